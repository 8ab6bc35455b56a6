#pragma once

#include "mhdm/pointwise.hpp"
#include "mhdm/spectral.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mhdm {

/// Parameters of a blind MHDM run. Scale n uses
/// (lambda_n, mu_n) = (lambda0, mu0) / decay^n.
struct RunConfig {
  double r = 1.0;    ///< image Sobolev exponent
  double s = 0.1;    ///< kernel Sobolev exponent
  double lambda0 = 1.4e-4;
  double mu0 = 6.3e5;
  double decay = 4.0;
  double tau = std::sqrt(1.001);
  double delta = 0.0; ///< bound on the L2 norm of the noise
  std::size_t max_iter = 30;
  /// The discrepancy rule may only stop at an index >= min_iter.
  std::size_t min_iter = 0;
  bool pin_means = true;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  double threshold() const { return tau * delta * delta; }
};

enum class StopReason { Discrepancy, MaxIter };

std::string to_string(StopReason reason);

/// Accumulated iterates and the per-scale increments that build them.
struct MhdmState {
  Spectrum U_hat;
  Spectrum K_hat;
  std::vector<Spectrum> scales_u;
  std::vector<Spectrum> scales_k;
  std::vector<double> residuals; ///< spatial ||K_n * U_n - f||^2 for each n
  std::vector<double> lambdas;
  std::vector<double> mus;
  /// Number of computed scales; the final iterate index is n - 1.
  std::size_t n = 0;
  bool stopped = false;
  StopReason stop_reason = StopReason::MaxIter;

  std::size_t stop_index() const { return n == 0 ? 0 : n - 1; }
};

/// First index whose residual is <= threshold, i.e. max{n : Phi_n > thr} + 1
/// for a non-increasing sequence. Empty when no entry qualifies.
std::optional<std::size_t> discrepancy_index(std::span<const double> residuals, double threshold,
                                             std::size_t min_index = 0);

MhdmState run_blind(const Image& f, const RunConfig& cfg);

/// Inverse transforms of the partial sums of scales 0..upto.
/// Throws IndexOutOfRange unless upto < state.n.
std::pair<Image, Image> reconstruct(const MhdmState& state, std::size_t upto);

} // namespace mhdm
