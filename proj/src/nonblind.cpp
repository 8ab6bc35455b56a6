#include "mhdm/nonblind.hpp"

#include "mhdm/degrade.hpp"
#include "mhdm/errors.hpp"

#include <cmath>

namespace mhdm {

namespace {

constexpr double kScheduleFloor = 1e-18;

Spectrum tikhonov_increment(const Spectrum& f_hat, const Spectrum& u_acc, const Spectrum& k_hat,
                            const SobolevWeight& wr, double lambda, bool pin_means, std::size_t step) {
  const std::size_t m = f_hat.rows();
  const std::size_t n = f_hat.cols();
  Spectrum inc(m, n);
  auto out = inc.mutable_values();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t mi = mirror_index(i, m);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t mj = mirror_index(j, n);
      if (mi < i || (mi == i && mj < j)) continue;
      Complex p;
      if (pin_means && i == 0 && j == 0) {
        p = step == 0 ? Complex(f_hat(0, 0).real(), 0.0) : Complex{};
      } else {
        const Complex k = k_hat(i, j);
        const Complex misfit = f_hat(i, j) - k * u_acc(i, j);
        p = std::conj(k) * misfit / (std::norm(k) + lambda * wr(i, j));
        if (mi == i && mj == j) p = Complex(p.real(), 0.0);
      }
      out[i * n + j] = p;
      out[mi * n + mj] = std::conj(p);
    }
  }
  inc.certify_hermitian();
  return inc;
}

} // namespace

void NonBlindConfig::validate() const {
  if (!(std::isfinite(r) && r >= 0.0)) throw InvalidArgument("nonblind config: r must be >= 0");
  if (!(std::isfinite(lambda0) && lambda0 > 0.0)) throw InvalidArgument("nonblind config: lambda0 must be > 0");
  if (!(std::isfinite(decay) && decay > 1.0)) throw InvalidArgument("nonblind config: decay must be > 1");
  if (!(std::isfinite(tau) && tau > 1.0)) throw InvalidArgument("nonblind config: tau must be > 1");
  if (!(std::isfinite(delta) && delta >= 0.0)) throw InvalidArgument("nonblind config: delta must be >= 0");
  if (max_iter < 1) throw InvalidArgument("nonblind config: max_iter must be >= 1");
  if (kernel.empty() || !kernel.all_finite()) throw InvalidArgument("nonblind config: kernel missing or not finite");
}

MhdmState run_nonblind(const Image& f, const NonBlindConfig& cfg) {
  cfg.validate();
  if (!f.same_shape(cfg.kernel)) throw DimensionMismatch("run_nonblind: kernel and observation differ in shape");
  if (!f.all_finite()) throw InvalidArgument("run_nonblind: observation must be finite");

  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  const Spectrum f_hat = forward_dft(f);
  const Spectrum k_hat = forward_dft(cfg.kernel);
  const SobolevWeight wr = sobolev_weights(m, n, cfg.r);
  const bool use_discrepancy = cfg.delta > 0.0;

  MhdmState state;
  state.U_hat = Spectrum(m, n);
  state.K_hat = k_hat;

  for (std::size_t step = 0; step <= cfg.max_iter; ++step) {
    const double lambda = cfg.lambda0 / std::pow(cfg.decay, static_cast<double>(step));
    if (lambda < kScheduleFloor * cfg.lambda0) break;
    Spectrum inc = tikhonov_increment(f_hat, state.U_hat, k_hat, wr, lambda, cfg.pin_means, step);
    state.U_hat += inc;
    state.scales_u.push_back(std::move(inc));
    state.scales_k.push_back(step == 0 ? k_hat : Spectrum(m, n));
    state.residuals.push_back(residual_l2_sq(f_hat, state.U_hat, k_hat));
    state.lambdas.push_back(lambda);
    state.mus.push_back(0.0);
    state.n = step + 1;
    if (use_discrepancy && step >= cfg.min_iter && state.residuals.back() <= cfg.threshold()) {
      state.stopped = true;
      state.stop_reason = StopReason::Discrepancy;
      return state;
    }
  }
  state.stopped = true;
  state.stop_reason = StopReason::MaxIter;
  return state;
}

std::vector<std::pair<double, MhdmState>> sweep_guessed_kernels(const Image& f,
                                                                const std::vector<double>& variances,
                                                                const NonBlindConfig& cfg) {
  if (variances.empty()) throw InvalidArgument("sweep_guessed_kernels: no variances given");
  std::vector<std::pair<double, MhdmState>> out;
  out.reserve(variances.size());
  for (double v : variances) {
    if (!(v > 0.0)) throw InvalidSigma("sweep_guessed_kernels: variances must be positive");
    NonBlindConfig run = cfg;
    run.kernel = gaussian_kernel(f.rows(), f.cols(), v);
    out.emplace_back(v, run_nonblind(f, run));
  }
  return out;
}

} // namespace mhdm
