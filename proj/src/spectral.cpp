#include "mhdm/spectral.hpp"

#include "mhdm/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace mhdm {

namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1))));
}

void require_same_shape(const Spectrum& a, const Spectrum& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(what) + ": spectra are " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

} // namespace

Image::Image(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), data_(rows * cols, value) {}

Image::Image(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("Image: " + std::to_string(data_.size()) + " values for a " +
                            std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
}

double Image::sum() const {
  double total = 0.0;
  for (double v : data_) total += v;
  return total;
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Spectrum::Spectrum(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {}

bool Spectrum::certify_hermitian(double tol) {
  hermitian_ = hermitian_defect(*this) <= tol;
  return hermitian_;
}

Spectrum& Spectrum::operator+=(const Spectrum& other) {
  require_same_shape(*this, other, "Spectrum::operator+=");
  // conj(a) + conj(b) == conj(a + b) exactly, so symmetry survives the sum.
  const bool both = hermitian_ && other.hermitian_;
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  hermitian_ = both;
  return *this;
}

Spectrum operator+(Spectrum lhs, const Spectrum& rhs) {
  lhs += rhs;
  return lhs;
}

double max_modulus(const Spectrum& spec) {
  double peak = 0.0;
  for (const Complex& v : spec.values()) peak = std::max(peak, std::abs(v));
  return peak;
}

double hermitian_defect(const Spectrum& spec) {
  const double peak = max_modulus(spec);
  if (peak == 0.0) return 0.0;
  const std::size_t m = spec.rows();
  const std::size_t n = spec.cols();
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t mi = mirror_index(i, m);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t mj = mirror_index(j, n);
      worst = std::max(worst, std::abs(spec(i, j) - std::conj(spec(mi, mj))));
    }
  }
  return worst / peak;
}

Spectrum forward_dft(const Image& img) {
  const std::size_t m = img.rows();
  const std::size_t n = img.cols();
  if (m == 0 || n == 0) throw InvalidArgument("forward_dft: empty image");
  const std::size_t half = n / 2 + 1;

  auto in = fftw_buffer<double>(m * n);
  auto out = fftw_buffer<fftw_complex>(m * half);
  std::copy(img.values().begin(), img.values().end(), in.get());

  PlanPtr plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_2d(static_cast<int>(m), static_cast<int>(n), in.get(), out.get(),
                                    FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());

  // The r2c output holds columns 0..n/2; the remaining columns are filled by
  // conjugation, which makes the result exactly symmetric.
  Spectrum spec(m, n);
  auto values = spec.mutable_values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < half; ++j) {
      values[i * n + j] = Complex(out[i * half + j][0], out[i * half + j][1]);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t mi = mirror_index(i, m);
    for (std::size_t j = half; j < n; ++j) {
      values[i * n + j] = std::conj(values[mi * n + mirror_index(j, n)]);
    }
  }
  // Self-conjugate bins of a real signal are real; drop round-off there.
  for (std::size_t i : {std::size_t{0}, m / 2}) {
    if (i >= m || mirror_index(i, m) != i) continue;
    for (std::size_t j : {std::size_t{0}, n / 2}) {
      if (j >= n || mirror_index(j, n) != j) continue;
      values[i * n + j] = Complex(values[i * n + j].real(), 0.0);
    }
  }
  spec.certify_hermitian();
  return spec;
}

Image inverse_dft(const Spectrum& spec) {
  const std::size_t m = spec.rows();
  const std::size_t n = spec.cols();
  if (m == 0 || n == 0) throw InvalidArgument("inverse_dft: empty spectrum");
  const double defect = hermitian_defect(spec);
  if (!(defect <= kHermitianTol)) {
    throw NonHermitianSpectrum("inverse_dft: conjugate symmetry violated (relative defect " +
                               std::to_string(defect) + ")");
  }

  auto buf = fftw_buffer<fftw_complex>(m * n);
  for (std::size_t k = 0; k < m * n; ++k) {
    buf[k][0] = spec.values()[k].real();
    buf[k][1] = spec.values()[k].imag();
  }
  PlanPtr plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(n), buf.get(), buf.get(),
                                FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());

  const double scale = 1.0 / static_cast<double>(m * n);
  Image img(m, n);
  auto values = img.values();
  for (std::size_t k = 0; k < m * n; ++k) values[k] = buf[k][0] * scale;
  return img;
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
  require_same_shape(a, b, "multiply");
  Spectrum out(a.rows(), a.cols());
  auto values = out.mutable_values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = a.values()[k] * b.values()[k];
  if (a.hermitian() && b.hermitian()) out.certify_hermitian();
  return out;
}

Image circular_convolve(const Image& u, const Image& k) {
  if (!u.same_shape(k)) throw DimensionMismatch("circular_convolve: image and kernel differ in shape");
  return inverse_dft(multiply(forward_dft(u), forward_dft(k)));
}

SobolevWeight sobolev_weights(std::size_t rows, std::size_t cols, double exponent) {
  if (rows == 0 || cols == 0) throw InvalidArgument("sobolev_weights: empty grid");
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw InvalidArgument("sobolev_weights: exponent must be finite and >= 0");
  }
  const double m = static_cast<double>(rows);
  const double n = static_cast<double>(cols);
  // Folding the index onto [0, len/2] makes the table exactly symmetric
  // under negation; cos is even so the values are unchanged.
  auto axis_term = [](std::size_t idx, std::size_t len, double scale) {
    const std::size_t folded = std::min(idx, len - idx);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(folded) / static_cast<double>(len);
    return 2.0 * scale * scale * (1.0 - std::cos(angle));
  };
  SobolevWeight w;
  w.exponent = exponent;
  w.weights = Image(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const double ti = axis_term(i, rows, m);
    for (std::size_t j = 0; j < cols; ++j) {
      const double delta = 1.0 + ti + axis_term(j, cols, n);
      w.weights(i, j) = std::pow(delta, exponent);
    }
  }
  return w;
}

double sobolev_norm_sq(const Spectrum& spec, const SobolevWeight& w) {
  if (spec.rows() != w.rows() || spec.cols() != w.cols()) {
    throw DimensionMismatch("sobolev_norm_sq: weight table does not match spectrum");
  }
  double total = 0.0;
  const auto values = spec.values();
  const auto weights = w.weights.values();
  for (std::size_t k = 0; k < values.size(); ++k) total += weights[k] * std::norm(values[k]);
  return total;
}

double residual_l2_sq(const Spectrum& f_hat, const Spectrum& u_hat, const Spectrum& k_hat) {
  require_same_shape(f_hat, u_hat, "residual_l2_sq");
  require_same_shape(f_hat, k_hat, "residual_l2_sq");
  double total = 0.0;
  for (std::size_t k = 0; k < f_hat.size(); ++k) {
    total += std::norm(k_hat.values()[k] * u_hat.values()[k] - f_hat.values()[k]);
  }
  return total / static_cast<double>(f_hat.size());
}

} // namespace mhdm
