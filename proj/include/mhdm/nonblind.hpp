#pragma once

#include "mhdm/blind.hpp"
#include "mhdm/spectral.hpp"

#include <utility>
#include <vector>

namespace mhdm {

/// MHDM on the image alone with a fixed (guessed) kernel.
struct NonBlindConfig {
  double r = 1.0;
  double lambda0 = 1.4e-4;
  double decay = 4.0;
  double tau = std::sqrt(1.001);
  double delta = 0.0;
  std::size_t max_iter = 30;
  std::size_t min_iter = 0;
  bool pin_means = true;
  Image kernel; ///< origin at (0,0)

  void validate() const;
  double threshold() const { return tau * delta * delta; }
};

/// Per bin, u_hat = conj(k_hat) (f_hat - k_hat U_hat) / (|k_hat|^2 + lambda_n Delta^r).
/// The returned state keeps the kernel spectrum in scales_k[0] and zero
/// increments afterwards, so reconstruct() works unchanged.
MhdmState run_nonblind(const Image& f, const NonBlindConfig& cfg);

/// One run per variance with the normalized centered Gaussian as the guess;
/// results keep the input order. Throws InvalidArgument for an empty list.
std::vector<std::pair<double, MhdmState>> sweep_guessed_kernels(const Image& f,
                                                                const std::vector<double>& variances,
                                                                const NonBlindConfig& cfg);

} // namespace mhdm
