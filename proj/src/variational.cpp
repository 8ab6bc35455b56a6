#include "mhdm/variational.hpp"

#include "mhdm/errors.hpp"
#include "mhdm/metrics.hpp"
#include "mhdm/pointwise.hpp"

#include <cmath>

namespace mhdm {

namespace {

void require_ratios(const std::vector<double>& ratios) {
  if (ratios.empty()) throw InvalidArgument("optimize_ratio: no ratios given");
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("optimize_ratio: ratios must be > 0");
  }
}

// Strictly better PSNR wins; equal PSNR keeps the smaller ratio.
bool improves(double candidate_psnr, double candidate_ratio, const RatioChoice& best, bool have_best) {
  if (!have_best) return true;
  if (candidate_psnr > best.psnr) return true;
  return candidate_psnr == best.psnr && candidate_ratio < best.ratio;
}

} // namespace

GridSearchResult run_grid_search(const Image& f, double ratio, double lambda_init, const RunConfig& cfg,
                                 double growth) {
  cfg.validate();
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InvalidArgument("run_grid_search: ratio must be > 0");
  if (!(lambda_init > 0.0) || !std::isfinite(lambda_init)) {
    throw InvalidArgument("run_grid_search: lambda_init must be > 0");
  }
  if (growth == 0.0) growth = 1.0 / cfg.decay;
  if (!(growth > 0.0) || growth == 1.0 || !std::isfinite(growth)) {
    throw InvalidArgument("run_grid_search: growth must be positive and != 1");
  }
  if (f.empty() || !f.all_finite()) throw InvalidArgument("run_grid_search: observation must be finite");

  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  const Spectrum f_hat = forward_dft(f);
  const SobolevWeight wr = sobolev_weights(m, n, cfg.r);
  const SobolevWeight ws = sobolev_weights(m, n, cfg.s);
  const ConstraintFlags constraints{cfg.pin_means};
  const Spectrum zero(m, n);

  GridSearchResult result;
  for (std::size_t step = 0; step <= cfg.max_iter; ++step) {
    const double lambda = lambda_init * std::pow(growth, static_cast<double>(step));
    const double mu = ratio * lambda;
    if (!(lambda > 0.0) || !(mu > 0.0) || !std::isfinite(lambda) || !std::isfinite(mu)) break;
    PlaneIncrement sol;
    try {
      sol = solve_plane(f_hat, zero, zero, wr, ws, lambda, mu, constraints, 0);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (grid point " + std::to_string(step) + ")", e.row(),
                        e.col(), static_cast<long>(step));
    }
    GridPoint point;
    point.lambda = lambda;
    point.mu = mu;
    point.residual = residual_l2_sq(f_hat, sol.u_hat, sol.k_hat);
    point.u = inverse_dft(sol.u_hat);
    point.k = inverse_dft(sol.k_hat);
    result.points.push_back(std::move(point));
    if (step >= cfg.min_iter && result.points.back().residual <= cfg.threshold()) {
      result.terminated = true;
      break;
    }
  }
  return result;
}

RatioChoice optimize_ratio(const Image& f, const Image& truth, const std::vector<double>& ratios,
                           const RunConfig& cfg) {
  require_ratios(ratios);
  RatioChoice best;
  bool have_best = false;
  for (double ratio : ratios) {
    const GridSearchResult grid = run_grid_search(f, ratio, cfg.lambda0, cfg);
    const GridPoint& accepted = grid.accepted();
    const double value = psnr(accepted.u, truth);
    if (improves(value, ratio, best, have_best)) {
      best = RatioChoice{ratio, accepted.u, accepted.k, value};
      have_best = true;
    }
  }
  return best;
}

RatioChoice optimize_blind_ratio(const Image& f, const Image& truth, const std::vector<double>& ratios,
                                 const RunConfig& cfg) {
  require_ratios(ratios);
  RatioChoice best;
  bool have_best = false;
  for (double ratio : ratios) {
    RunConfig run = cfg;
    run.mu0 = ratio * cfg.lambda0;
    const MhdmState state = run_blind(f, run);
    auto [u, k] = reconstruct(state, state.n - 1);
    const double value = psnr(u, truth);
    if (improves(value, ratio, best, have_best)) {
      best = RatioChoice{ratio, std::move(u), std::move(k), value};
      have_best = true;
    }
  }
  return best;
}

} // namespace mhdm
