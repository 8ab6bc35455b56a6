#include "mhdm/metrics.hpp"

#include "mhdm/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mhdm {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kRange = 1.0;

void require_same_shape(const Image& x, const Image& ref, const char* what) {
  if (!x.same_shape(ref)) throw DimensionMismatch(std::string(what) + ": images differ in shape");
  if (x.empty()) throw InvalidArgument(std::string(what) + ": empty image");
}

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w{};
  const int half = kWindow / 2;
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    for (int j = 0; j < kWindow; ++j) {
      const double di = i - half;
      const double dj = j - half;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * kWindowSigma * kWindowSigma));
      w[static_cast<std::size_t>(i * kWindow + j)] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return w;
}

} // namespace

double psnr(const Image& x, const Image& ref, double peak) {
  require_same_shape(x, ref, "psnr");
  if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be > 0");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x.values()[k] - ref.values()[k];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& x, const Image& ref) {
  require_same_shape(x, ref, "ssim");
  if (x.rows() < kWindow || x.cols() < kWindow) {
    throw TooSmall("ssim: images must be at least 11x11");
  }
  static const auto window = gaussian_window();
  const double c1 = (kK1 * kRange) * (kK1 * kRange);
  const double c2 = (kK2 * kRange) * (kK2 * kRange);

  const std::size_t out_rows = x.rows() - kWindow + 1;
  const std::size_t out_cols = x.cols() - kWindow + 1;
  double total = 0.0;
  for (std::size_t r0 = 0; r0 < out_rows; ++r0) {
    for (std::size_t c0 = 0; c0 < out_cols; ++c0) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int i = 0; i < kWindow; ++i) {
        for (int j = 0; j < kWindow; ++j) {
          const double w = window[static_cast<std::size_t>(i * kWindow + j)];
          const double a = x(r0 + i, c0 + j);
          const double b = ref(r0 + i, c0 + j);
          mx += w * a;
          my += w * b;
          sxx += w * a * a;
          syy += w * b * b;
          sxy += w * a * b;
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cov = sxy - mx * my;
      total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return total / static_cast<double>(out_rows * out_cols);
}

double rel_l2_error(const Image& x, const Image& ref) {
  require_same_shape(x, ref, "rel_l2_error");
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x.values()[k] - ref.values()[k];
    diff += d * d;
    norm += ref.values()[k] * ref.values()[k];
  }
  if (norm == 0.0) throw ZeroReference("rel_l2_error: reference has zero norm");
  return std::sqrt(diff / norm);
}

Image center_for_display(const Image& kernel) {
  const std::size_t m = kernel.rows();
  const std::size_t n = kernel.cols();
  Image out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out((i + m / 2) % m, (j + n / 2) % n) = kernel(i, j);
  }
  return out;
}

} // namespace mhdm
