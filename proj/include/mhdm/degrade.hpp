#pragma once

#include "mhdm/spectral.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace mhdm {

/// Name of the noise generator recorded in manifests: 64-bit Mersenne
/// Twister (std::mt19937_64) feeding a Box-Muller transform. Both are fully
/// specified, so a seed replays bit-for-bit across standard libraries.
inline constexpr std::string_view kNoiseGenerator = "mt19937_64+box-muller";

/// Gaussian of the given variance (pixel^2) on the periodic m x n grid,
/// peaked at (0,0), summed over one alias period in each direction and
/// normalized to unit sum. Throws InvalidSigma unless variance > 0.
Image gaussian_kernel(std::size_t rows, std::size_t cols, double variance);

struct GaussianComponent {
  double weight = 1.0;
  double variance = 1.0;
  double center_row = 0.0;
  double center_col = 0.0;
};

/// Convex combination of periodic Gaussians, each normalized before
/// weighting. Throws InvalidWeights unless the weights are >= 0 and sum to 1
/// (within 1e-9), InvalidSigma for a non-positive variance.
Image gaussian_mixture_kernel(std::size_t rows, std::size_t cols,
                              const std::vector<GaussianComponent>& components);

/// Impulse at (0,0).
Image delta_kernel(std::size_t rows, std::size_t cols);

struct Degraded {
  Image observation;
  double delta = 0.0; ///< realized ||noise||_2
};

/// observation = k * u (circular) + noise, i.i.d. N(0, noise_var) per pixel.
Degraded degrade(const Image& u, const Image& k, double noise_var, std::uint64_t seed);

/// Deterministic i.i.d. standard normal samples.
std::vector<double> standard_normal(std::size_t count, std::uint64_t seed);

} // namespace mhdm
