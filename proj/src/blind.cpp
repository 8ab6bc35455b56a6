#include "mhdm/blind.hpp"

#include "mhdm/errors.hpp"

#include <cmath>

namespace mhdm {

namespace {

constexpr double kScheduleFloor = 1e-18;

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgument(message);
}

} // namespace

void RunConfig::validate() const {
  require(std::isfinite(r) && r >= 0.0, "config: r must be finite and >= 0");
  require(std::isfinite(s) && s >= 0.0, "config: s must be finite and >= 0");
  require(std::isfinite(lambda0) && lambda0 > 0.0, "config: lambda0 must be > 0");
  require(std::isfinite(mu0) && mu0 > 0.0, "config: mu0 must be > 0");
  require(std::isfinite(decay) && decay > 1.0, "config: decay must be > 1");
  require(std::isfinite(tau) && tau > 1.0, "config: tau must be > 1");
  require(std::isfinite(delta) && delta >= 0.0, "config: delta must be >= 0");
  require(max_iter >= 1, "config: max_iter must be >= 1");
}

std::string to_string(StopReason reason) {
  switch (reason) {
  case StopReason::Discrepancy: return "discrepancy";
  case StopReason::MaxIter: return "max_iter";
  }
  return "unknown";
}

std::optional<std::size_t> discrepancy_index(std::span<const double> residuals, double threshold,
                                             std::size_t min_index) {
  for (std::size_t i = min_index; i < residuals.size(); ++i) {
    if (residuals[i] <= threshold) return i;
  }
  return std::nullopt;
}

MhdmState run_blind(const Image& f, const RunConfig& cfg) {
  cfg.validate();
  if (f.empty() || !f.all_finite()) throw InvalidArgument("run_blind: observation must be non-empty and finite");

  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  const Spectrum f_hat = forward_dft(f);
  const SobolevWeight wr = sobolev_weights(m, n, cfg.r);
  const SobolevWeight ws = sobolev_weights(m, n, cfg.s);
  const ConstraintFlags constraints{cfg.pin_means};
  const bool use_discrepancy = cfg.delta > 0.0;
  const double threshold = cfg.threshold();

  MhdmState state;
  state.U_hat = Spectrum(m, n);
  state.K_hat = Spectrum(m, n);

  for (std::size_t step = 0; step <= cfg.max_iter; ++step) {
    const double shrink = std::pow(cfg.decay, static_cast<double>(step));
    const double lambda = cfg.lambda0 / shrink;
    const double mu = cfg.mu0 / shrink;
    if (lambda < kScheduleFloor * cfg.lambda0 || mu < kScheduleFloor * cfg.mu0) break;

    PlaneIncrement inc;
    try {
      inc = solve_plane(f_hat, state.U_hat, state.K_hat, wr, ws, lambda, mu, constraints, step);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (iteration " + std::to_string(step) + ")", e.row(),
                        e.col(), static_cast<long>(step));
    }
    state.U_hat += inc.u_hat;
    state.K_hat += inc.k_hat;
    state.scales_u.push_back(std::move(inc.u_hat));
    state.scales_k.push_back(std::move(inc.k_hat));
    state.residuals.push_back(residual_l2_sq(f_hat, state.U_hat, state.K_hat));
    state.lambdas.push_back(lambda);
    state.mus.push_back(mu);
    state.n = step + 1;

    if (use_discrepancy && step >= cfg.min_iter && state.residuals.back() <= threshold) {
      state.stopped = true;
      state.stop_reason = StopReason::Discrepancy;
      return state;
    }
  }
  state.stopped = true;
  state.stop_reason = StopReason::MaxIter;
  return state;
}

std::pair<Image, Image> reconstruct(const MhdmState& state, std::size_t upto) {
  if (upto >= state.n || upto >= state.scales_u.size() || upto >= state.scales_k.size()) {
    throw IndexOutOfRange("reconstruct: scale " + std::to_string(upto) + " requested, " +
                          std::to_string(state.n) + " available");
  }
  Spectrum u = state.scales_u[0];
  Spectrum k = state.scales_k[0];
  for (std::size_t i = 1; i <= upto; ++i) {
    u += state.scales_u[i];
    k += state.scales_k[i];
  }
  return {inverse_dft(u), inverse_dft(k)};
}

} // namespace mhdm
