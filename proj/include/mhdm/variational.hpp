#pragma once

#include "mhdm/blind.hpp"
#include "mhdm/spectral.hpp"

#include <vector>

namespace mhdm {

/// One single-step blind solution on the parameter grid.
struct GridPoint {
  double lambda = 0.0;
  double mu = 0.0;
  Image u;
  Image k;
  double residual = 0.0;
};

struct GridSearchResult {
  std::vector<GridPoint> points; ///< the last entry is the accepted one
  /// False when max_iter was reached with the residual still above tau*delta^2.
  bool terminated = false;

  const GridPoint& accepted() const { return points.back(); }
};

/// Single-step variational blind deconvolution evaluated at
/// (lambda_n, mu_n) = (lambda_init, ratio * lambda_init) * growth^n for
/// n = 0..cfg.max_iter, stopping at the first n >= cfg.min_iter whose
/// residual is <= tau*delta^2. The default growth 1/cfg.decay walks the same
/// decreasing schedule as the MHDM.
GridSearchResult run_grid_search(const Image& f, double ratio, double lambda_init, const RunConfig& cfg,
                                 double growth = 0.0);

struct RatioChoice {
  double ratio = 0.0;
  Image u;
  Image k;
  double psnr = 0.0;
};

/// Ratio mu0/lambda0 whose accepted grid-search reconstruction has the
/// highest PSNR against `truth`; ties go to the smaller ratio.
RatioChoice optimize_ratio(const Image& f, const Image& truth, const std::vector<double>& ratios,
                           const RunConfig& cfg);

/// Same selection rule for the blind MHDM (lambda0 kept, mu0 = ratio * lambda0).
RatioChoice optimize_blind_ratio(const Image& f, const Image& truth, const std::vector<double>& ratios,
                                 const RunConfig& cfg);

} // namespace mhdm
