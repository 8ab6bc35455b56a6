#include "mhdm/degrade.hpp"

#include "mhdm/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mhdm {

namespace {

// Periodic 1-D Gaussian profile centered at `center`, aliases at +-len.
std::vector<double> periodic_profile(std::size_t len, double variance, double center) {
  std::vector<double> g(len);
  const double L = static_cast<double>(len);
  for (std::size_t i = 0; i < len; ++i) {
    double d = static_cast<double>(i) - center;
    d -= L * std::round(d / L);
    // Fold so that i and -i see the same alias set.
    d = std::abs(d);
    double acc = 0.0;
    for (int t = -1; t <= 1; ++t) {
      const double x = d + t * L;
      acc += std::exp(-x * x / (2.0 * variance));
    }
    g[i] = acc;
  }
  return g;
}

Image component_kernel(std::size_t rows, std::size_t cols, const GaussianComponent& c) {
  if (!(c.variance > 0.0) || !std::isfinite(c.variance)) {
    throw InvalidSigma("gaussian kernel: variance must be positive and finite");
  }
  const auto gr = periodic_profile(rows, c.variance, c.center_row);
  const auto gc = periodic_profile(cols, c.variance, c.center_col);
  Image k(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) k(i, j) = gr[i] * gc[j];
  }
  const double total = k.sum();
  for (double& v : k.values()) v /= total;
  return k;
}

} // namespace

Image gaussian_kernel(std::size_t rows, std::size_t cols, double variance) {
  if (rows == 0 || cols == 0) throw InvalidArgument("gaussian_kernel: empty grid");
  return component_kernel(rows, cols, GaussianComponent{1.0, variance, 0.0, 0.0});
}

Image gaussian_mixture_kernel(std::size_t rows, std::size_t cols,
                              const std::vector<GaussianComponent>& components) {
  if (rows == 0 || cols == 0) throw InvalidArgument("gaussian_mixture_kernel: empty grid");
  if (components.empty()) throw InvalidWeights("gaussian_mixture_kernel: no components");
  double weight_sum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw InvalidWeights("gaussian_mixture_kernel: weights must be non-negative");
    }
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw InvalidWeights("gaussian_mixture_kernel: weights must sum to 1");
  }
  if (components.size() == 1) return component_kernel(rows, cols, components.front());

  Image k(rows, cols);
  for (const auto& c : components) {
    const Image part = component_kernel(rows, cols, c);
    for (std::size_t idx = 0; idx < k.size(); ++idx) k.values()[idx] += c.weight * part.values()[idx];
  }
  const double total = k.sum();
  for (double& v : k.values()) v /= total;
  return k;
}

Image delta_kernel(std::size_t rows, std::size_t cols) {
  Image k(rows, cols);
  k(0, 0) = 1.0;
  return k;
}

std::vector<double> standard_normal(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // 53-bit uniform in (0, 1].
  auto uniform = [&engine]() {
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  std::vector<double> out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = kTwoPi * uniform();
    out.push_back(radius * std::cos(angle));
    out.push_back(radius * std::sin(angle));
  }
  out.resize(count);
  return out;
}

Degraded degrade(const Image& u, const Image& k, double noise_var, std::uint64_t seed) {
  if (!u.same_shape(k)) throw DimensionMismatch("degrade: image and kernel differ in shape");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw InvalidArgument("degrade: noise variance must be >= 0");
  }
  Degraded out{circular_convolve(u, k), 0.0};
  if (noise_var == 0.0) return out;

  const double sd = std::sqrt(noise_var);
  const auto noise = standard_normal(u.size(), seed);
  double energy = 0.0;
  auto values = out.observation.values();
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double v = sd * noise[idx];
    values[idx] += v;
    energy += v * v;
  }
  out.delta = std::sqrt(energy);
  return out;
}

} // namespace mhdm
