#pragma once

// Shared fixtures: a small synthetic scene and brute-force reference
// implementations used as oracles.

#include "mhdm/quintic.hpp"
#include "mhdm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testing_support {

using mhdm::Complex;
using mhdm::Image;
using mhdm::RealPolynomial;

// Smooth blobs plus a bright square, values in [0, 1].
inline Image synthetic_scene(std::size_t rows, std::size_t cols) {
  Image u(rows, cols);
  const double m = static_cast<double>(rows);
  const double n = static_cast<double>(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = static_cast<double>(i) / m;
      const double y = static_cast<double>(j) / n;
      double v = 0.15;
      v += 0.5 * std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.35) * (y - 0.35)) / 0.01);
      v += 0.35 * std::exp(-((x - 0.7) * (x - 0.7) + (y - 0.65) * (y - 0.65)) / 0.004);
      if (x > 0.55 && x < 0.8 && y > 0.15 && y < 0.4) v += 0.4;
      u(i, j) = std::min(v, 1.0);
    }
  }
  return u;
}

inline Image random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Image img(rows, cols);
  for (double& v : img.values()) v = dist(rng);
  return img;
}

// O((mn)^2) transform straight from the definition.
inline std::vector<Complex> naive_dft(const Image& x, int sign = -1) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  std::vector<Complex> out(m * n);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      Complex acc{};
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double phase = sign * 2.0 * std::numbers::pi *
                               (static_cast<double>(k * i) / m + static_cast<double>(l * j) / n);
          acc += x(i, j) * Complex(std::cos(phase), std::sin(phase));
        }
      }
      out[k * n + l] = acc;
    }
  }
  return out;
}

// Direct spatial circular convolution.
inline Image naive_convolve(const Image& u, const Image& k) {
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  Image out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < n; ++b) acc += k(a, b) * u((i + m - a) % m, (j + n - b) % n);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

inline double squared_distance(const Image& a, const Image& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  return acc;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a.values()[i] - b.values()[i]));
  return acc;
}

// Minimum over q (with q + q_n >= 0) and complex p of
//   |(p + p_n)(q + q_n) - z|^2 + a|p|^2 + b q^2.
// For fixed y = q + q_n the image part is a quadratic in P = p + p_n whose
// minimum is |z|^2 + a|p_n|^2 - |z y + a p_n|^2 / (y^2 + a); the remaining
// 1-D function is scanned on a dense grid and refined by golden section.
struct OracleResult {
  double objective;
  double y;
};

inline OracleResult frequency_oracle(double a, double b, Complex p_n, double q_n, Complex z,
                                     int grid = 4000) {
  auto reduced = [&](double y) {
    const double q = y - q_n;
    return std::norm(z) + a * std::norm(p_n) - std::norm(z * y + a * p_n) / (y * y + a) + b * q * q;
  };
  const double at_zero = reduced(q_n);
  const double reach = std::sqrt(std::max(at_zero, 0.0) / b) * 1.001 + 1e-12;
  const double lo = std::max(0.0, q_n - reach);
  const double hi = q_n + reach;
  std::vector<double> ys(static_cast<std::size_t>(grid) + 1);
  std::vector<double> vals(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ys[i] = lo + (hi - lo) * static_cast<double>(i) / grid;
    vals[i] = reduced(ys[i]);
  }
  OracleResult best{at_zero, q_n};
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i + 1 == ys.size() || vals[i] <= vals[i + 1];
    if (!left_ok || !right_ok) continue;
    double l = ys[i == 0 ? 0 : i - 1];
    double r = ys[i + 1 == ys.size() ? i : i + 1];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && r - l > 1e-15 * (1.0 + r); ++it) {
      const double m1 = r - phi * (r - l);
      const double m2 = l + phi * (r - l);
      if (reduced(m1) < reduced(m2)) r = m2;
      else l = m1;
    }
    for (double y : {0.5 * (l + r), ys[i]}) {
      const double v = reduced(y);
      if (v < best.objective) best = {v, y};
    }
  }
  return best;
}

inline double eval(const RealPolynomial& p, double x) {
  double acc = 0.0;
  for (int i = 5; i >= 0; --i) acc = acc * x + p.coeffs[static_cast<std::size_t>(i)];
  return acc;
}

// Sign changes on a fine grid over the Cauchy bound, refined by bisection.
inline std::vector<double> bisection_roots(const RealPolynomial& p) {
  int deg = 5;
  while (deg > 0 && p.coeffs[static_cast<std::size_t>(deg)] == 0.0) --deg;
  double bound = 1.0;
  for (int i = 0; i < deg; ++i) {
    bound = std::max(bound, 1.0 + std::abs(p.coeffs[static_cast<std::size_t>(i)] /
                                           p.coeffs[static_cast<std::size_t>(deg)]));
  }
  const int samples = 200000;
  std::vector<double> roots;
  double x0 = -bound;
  double f0 = eval(p, x0);
  for (int s = 1; s <= samples; ++s) {
    const double x1 = -bound + 2.0 * bound * s / samples;
    const double f1 = eval(p, x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval(p, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

} // namespace testing_support
