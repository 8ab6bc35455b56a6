#pragma once

// Discrete Fourier machinery shared by every solver.
//
// Conventions:
//   * images are row-major, indices are 0-based, bin (0,0) is the DC bin;
//   * the forward transform is the unnormalized sum
//       X[k,l] = sum_{i,j} x[i,j] exp(-2 pi i (k i / m + l j / n)),
//     the inverse carries the 1/(mn) factor;
//   * convolution is circular (periodic boundary).
// With this convention sum_x |x|^2 = (1/(mn)) sum_k |X|^2, and every residual
// that is compared against a spatial noise level carries that factor.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mhdm {

using Complex = std::complex<double>;

/// Relative tolerance used to accept a spectrum as conjugate symmetric.
inline constexpr double kHermitianTol = 1e-10;

/// Real m x n grid of pixel values.
class Image {
public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double value = 0.0);
  Image(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double sum() const;
  bool all_finite() const;
  bool same_shape(const Image& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Complex m x n array of DFT coefficients.
///
/// The hermitian flag is only ever set after the symmetry check
/// X[i,j] == conj(X[-i,-j]) has passed; any mutable access clears it.
class Spectrum {
public:
  Spectrum() = default;
  /// Zero spectrum; trivially hermitian.
  Spectrum(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const Complex> values() const { return data_; }

  Complex& mut(std::size_t i, std::size_t j) {
    hermitian_ = false;
    return data_[i * cols_ + j];
  }
  std::span<Complex> mutable_values() {
    hermitian_ = false;
    return data_;
  }

  bool hermitian() const { return hermitian_; }
  /// Re-runs the symmetry check and sets the flag accordingly.
  bool certify_hermitian(double tol = kHermitianTol);

  bool same_shape(const Spectrum& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  Spectrum& operator+=(const Spectrum& other);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
  bool hermitian_ = true;
};

Spectrum operator+(Spectrum lhs, const Spectrum& rhs);

/// Index of the conjugate partner of i on a periodic axis of length len.
inline std::size_t mirror_index(std::size_t i, std::size_t len) { return (len - i) % len; }

/// max |X[i,j] - conj(X[-i,-j])| relative to max |X| (0 for the zero spectrum).
double hermitian_defect(const Spectrum& spec);

/// Max modulus over all bins.
double max_modulus(const Spectrum& spec);

Spectrum forward_dft(const Image& img);

/// Throws NonHermitianSpectrum when the symmetry defect exceeds kHermitianTol.
Image inverse_dft(const Spectrum& spec);

/// Circular convolution computed through the transform.
Image circular_convolve(const Image& u, const Image& k);

/// Bin-wise product.
Spectrum multiply(const Spectrum& a, const Spectrum& b);

/// Table of Delta_{i,j}^exponent with
///   Delta_{i,j} = 1 + 2 m^2 (1 - cos(2 pi i / m)) + 2 n^2 (1 - cos(2 pi j / n)).
struct SobolevWeight {
  double exponent = 0.0;
  Image weights;

  std::size_t rows() const { return weights.rows(); }
  std::size_t cols() const { return weights.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return weights(i, j); }
};

SobolevWeight sobolev_weights(std::size_t rows, std::size_t cols, double exponent);

/// sum_{i,j} w[i,j] |X[i,j]|^2, in Fourier units (no 1/(mn) factor).
double sobolev_norm_sq(const Spectrum& spec, const SobolevWeight& w);

/// Spatial squared residual ||k*u - f||^2, evaluated as
/// (1/(mn)) sum |K_hat U_hat - f_hat|^2.
double residual_l2_sq(const Spectrum& f_hat, const Spectrum& u_hat, const Spectrum& k_hat);

} // namespace mhdm
