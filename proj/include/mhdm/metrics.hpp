#pragma once

#include "mhdm/spectral.hpp"

namespace mhdm {

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Image& x, const Image& ref, double peak = 1.0);

/// Mean structural similarity over all valid 11x11 windows (Gaussian weights,
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1). Requires >= 11x11.
double ssim(const Image& x, const Image& ref);

/// ||x - ref||_2 / ||ref||_2. Not symmetric. Both kernels are expected with
/// their origin at (0,0), as produced everywhere in this library.
double rel_l2_error(const Image& x, const Image& ref);

/// Circularly shifts the origin to the grid center for display.
Image center_for_display(const Image& kernel);

} // namespace mhdm
