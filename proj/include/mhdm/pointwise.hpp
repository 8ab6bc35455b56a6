#pragma once

#include "mhdm/quintic.hpp"
#include "mhdm/spectral.hpp"

#include <cstddef>

namespace mhdm {

/// One frequency bin of an MHDM step:
///
///   minimize_{p, q}  |(p + p_n)(q + q_n) - z|^2 + a |p|^2 + b |q|^2
///
/// where a = lambda * Delta^r and b = mu * Delta^s at the bin, p_n and q_n are
/// the accumulated image and kernel spectra, and z is the data spectrum.
struct FrequencyProblem {
  double a = 1.0;
  double b = 1.0;
  Complex p_n{};
  double q_n = 0.0;
  Complex z{};
};

struct FrequencySolution {
  Complex p_star{};   ///< image increment
  double q_star = 0.0; ///< kernel increment (real)
  double objective = 0.0;
};

/// Value of the bin objective at the increment (p, q).
double step_objective(const FrequencyProblem& fp, Complex p, double q);

/// Closed-form minimizer of |p q - z|^2 + a|p|^2 + b|q|^2 with q >= 0 and
/// p in the phase of z:
///   q = sqrt([sqrt(a/b)|z| - a]_+),  p = sgn(z) sqrt([sqrt(b/a)|z| - b]_+).
FrequencySolution solve_initial(double a, double b, Complex z);

/// Quintic in y = q + q_n whose real roots are the critical kernel values:
///   b y^5 - b q_n y^4 + 2ab y^3 + (a c - 2ab q_n) y^2
///     + (a^2 |p_n|^2 - a|z|^2 + a^2 b) y - a^2 (c + b q_n),
/// with c = Re(conj(z) p_n).
RealPolynomial step_polynomial(const FrequencyProblem& fp);

/// Minimizer over the real roots of step_polynomial, p from the first-order
/// condition p + p_n = (a p_n + z (q + q_n)) / ((q + q_n)^2 + a).
/// Throws InvalidArgument when the problem violates its invariants and
/// NoRealRoot if the polynomial has no admissible real root.
FrequencySolution solve_step(const FrequencyProblem& fp);

struct ConstraintFlags {
  /// Pin the DC bins so that sum(K) = 1 and sum(U) = sum(f).
  bool pin_means = true;
};

struct PlaneIncrement {
  Spectrum u_hat;
  Spectrum k_hat;
};

/// Solves every bin of one MHDM step. Bins are solved on one half of the
/// index set and mirrored by conjugation, so both outputs are hermitian and
/// k_hat is real with K_hat + k_hat >= 0.
///
/// step == 0 uses the closed form (the accumulated spectra are ignored);
/// step >= 1 uses solve_step. With pin_means the DC bin is set to
/// (f_hat(0,0), 1) at step 0 and (0, 0) afterwards.
PlaneIncrement solve_plane(const Spectrum& f_hat, const Spectrum& u_acc, const Spectrum& k_acc,
                           const SobolevWeight& wr, const SobolevWeight& ws, double lambda,
                           double mu, const ConstraintFlags& constraints, std::size_t step);

} // namespace mhdm
