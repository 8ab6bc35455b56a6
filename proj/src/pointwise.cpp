#include "mhdm/pointwise.hpp"

#include "mhdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace mhdm {

namespace {

constexpr double kInvariantTol = 1e-9;
constexpr double kTieTol = 1e-12;

Complex phase_of(Complex z) {
  const double r = std::abs(z);
  return r == 0.0 ? Complex{} : z / r;
}

void check_weights(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("frequency problem: a and b must be positive and finite");
  }
}

struct Candidate {
  double y = 0.0;
  Complex p{};
  double objective = 0.0;
};

Candidate evaluate(const FrequencyProblem& fp, double y) {
  Candidate c;
  c.y = y;
  const Complex total_p = (fp.a * fp.p_n + fp.z * y) / (y * y + fp.a);
  c.p = total_p - fp.p_n;
  c.objective = step_objective(fp, c.p, y - fp.q_n);
  return c;
}

// Lower objective wins; within the tie tolerance the smaller |q| wins, then
// a non-negative increment.
bool better(const Candidate& lhs, const Candidate& rhs, double q_n) {
  const double scale = std::max(1.0, std::max(std::abs(lhs.objective), std::abs(rhs.objective)));
  if (lhs.objective < rhs.objective - kTieTol * scale) return true;
  if (rhs.objective < lhs.objective - kTieTol * scale) return false;
  const double ql = std::abs(lhs.y - q_n);
  const double qr = std::abs(rhs.y - q_n);
  if (ql != qr) return ql < qr;
  return lhs.y >= q_n && rhs.y < q_n;
}

} // namespace

double step_objective(const FrequencyProblem& fp, Complex p, double q) {
  return std::norm((p + fp.p_n) * (q + fp.q_n) - fp.z) + fp.a * std::norm(p) + fp.b * q * q;
}

FrequencySolution solve_initial(double a, double b, Complex z) {
  check_weights(a, b);
  FrequencySolution sol;
  const double modulus = std::abs(z);
  if (modulus == 0.0) return sol;
  const double q_sq = std::sqrt(a / b) * modulus - a;
  const double p_sq = std::sqrt(b / a) * modulus - b;
  sol.q_star = q_sq > 0.0 ? std::sqrt(q_sq) : 0.0;
  sol.p_star = p_sq > 0.0 ? phase_of(z) * std::sqrt(p_sq) : Complex{};
  sol.objective = std::norm(sol.p_star * sol.q_star - z) + a * std::norm(sol.p_star) +
                  b * sol.q_star * sol.q_star;
  return sol;
}

RealPolynomial step_polynomial(const FrequencyProblem& fp) {
  const double a = fp.a;
  const double b = fp.b;
  const double qn = fp.q_n;
  const double c = (std::conj(fp.z) * fp.p_n).real();
  RealPolynomial poly;
  poly.coeffs[5] = b;
  poly.coeffs[4] = -b * qn;
  poly.coeffs[3] = 2.0 * a * b;
  poly.coeffs[2] = a * c - 2.0 * a * b * qn;
  poly.coeffs[1] = a * a * std::norm(fp.p_n) - a * std::norm(fp.z) + a * a * b;
  poly.coeffs[0] = -a * a * (c + b * qn);
  return poly;
}

FrequencySolution solve_step(const FrequencyProblem& input) {
  check_weights(input.a, input.b);
  FrequencyProblem fp = input;
  if (!std::isfinite(fp.q_n) || !std::isfinite(fp.p_n.real()) || !std::isfinite(fp.p_n.imag()) ||
      !std::isfinite(fp.z.real()) || !std::isfinite(fp.z.imag())) {
    throw InvalidArgument("solve_step: non-finite input");
  }
  if (fp.q_n < 0.0) {
    if (fp.q_n < -kInvariantTol) {
      throw InvalidArgument("solve_step: accumulated kernel spectrum is negative (" +
                            std::to_string(fp.q_n) + ")");
    }
    fp.q_n = 0.0;
  }
  const Complex cross = std::conj(fp.z) * fp.p_n;
  const double cross_tol = kInvariantTol * std::abs(fp.z) * std::abs(fp.p_n);
  if (std::abs(cross.imag()) > cross_tol + 1e-300 || cross.real() < -cross_tol) {
    throw InvalidArgument("solve_step: image spectrum is not in the phase of the data");
  }

  if (fp.z == Complex{} && fp.p_n == Complex{} && fp.q_n == 0.0) return {};

  const std::vector<double> roots = real_roots(step_polynomial(fp));
  if (roots.empty()) throw NoRealRoot("solve_step: quintic has no real root", 0, 0);

  const double y_tol = kInvariantTol * std::max(1.0, fp.q_n);
  std::optional<Candidate> best;
  for (double y : roots) {
    if (y < -y_tol) continue;
    const Candidate cand = evaluate(fp, std::max(y, 0.0));
    if (!best || better(cand, *best, fp.q_n)) best = cand;
  }
  if (!best) throw NoRealRoot("solve_step: no root keeps the kernel spectrum non-negative", 0, 0);

  // Zero kernel increment (with its optimal image increment) guards the
  // selection against round-off in the root locations.
  const Candidate keep = evaluate(fp, fp.q_n);
  if (keep.objective < best->objective) best = keep;

  FrequencySolution sol;
  sol.p_star = best->p;
  sol.q_star = best->y - fp.q_n;
  sol.objective = best->objective;
  return sol;
}

PlaneIncrement solve_plane(const Spectrum& f_hat, const Spectrum& u_acc, const Spectrum& k_acc,
                           const SobolevWeight& wr, const SobolevWeight& ws, double lambda,
                           double mu, const ConstraintFlags& constraints, std::size_t step) {
  const std::size_t m = f_hat.rows();
  const std::size_t n = f_hat.cols();
  if (!f_hat.same_shape(u_acc) || !f_hat.same_shape(k_acc) || wr.rows() != m || wr.cols() != n ||
      ws.rows() != m || ws.cols() != n) {
    throw DimensionMismatch("solve_plane: inputs differ in shape");
  }
  if (!(lambda > 0.0) || !(mu > 0.0)) throw InvalidArgument("solve_plane: lambda and mu must be > 0");
  if (step > 0 && (!u_acc.hermitian() || !k_acc.hermitian())) {
    throw NonHermitianSpectrum("solve_plane: accumulated iterates are not hermitian");
  }

  PlaneIncrement inc{Spectrum(m, n), Spectrum(m, n)};
  auto u_out = inc.u_hat.mutable_values();
  auto k_out = inc.k_hat.mutable_values();

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t mi = mirror_index(i, m);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t mj = mirror_index(j, n);
      // Canonical representative of each conjugate pair.
      if (mi < i || (mi == i && mj < j)) continue;
      const bool self_conjugate = (mi == i && mj == j);
      const std::size_t idx = i * n + j;

      Complex p;
      double q;
      if (constraints.pin_means && i == 0 && j == 0) {
        p = step == 0 ? Complex(f_hat(0, 0).real(), 0.0) : Complex{};
        q = step == 0 ? 1.0 : 0.0;
      } else {
        const double a = lambda * wr(i, j);
        const double b = mu * ws(i, j);
        Complex z = f_hat(i, j);
        if (self_conjugate) z = Complex(z.real(), 0.0);
        try {
          FrequencySolution sol;
          if (step == 0) {
            sol = solve_initial(a, b, z);
          } else {
            FrequencyProblem fp;
            fp.a = a;
            fp.b = b;
            fp.p_n = self_conjugate ? Complex(u_acc(i, j).real(), 0.0) : u_acc(i, j);
            const Complex kv = k_acc(i, j);
            if (std::abs(kv.imag()) > kInvariantTol * (1.0 + std::abs(kv))) {
              throw InvalidArgument("solve_plane: accumulated kernel spectrum is not real");
            }
            fp.q_n = kv.real();
            fp.z = z;
            sol = solve_step(fp);
          }
          p = sol.p_star;
          q = sol.q_star;
          const double q_before = step == 0 ? 0.0 : k_acc(i, j).real();
          if (q_before + q < 0.0) q = -q_before;
        } catch (const SolverError& e) {
          throw NoRealRoot(e.what(), i, j);
        } catch (const InvalidArgument& e) {
          throw SolverError(std::string(e.what()), i, j);
        }
        if (self_conjugate) p = Complex(p.real(), 0.0);
      }
      u_out[idx] = p;
      k_out[idx] = Complex(q, 0.0);
      const std::size_t midx = mi * n + mj;
      u_out[midx] = std::conj(p);
      k_out[midx] = Complex(q, 0.0);
    }
  }
  inc.u_hat.certify_hermitian();
  inc.k_hat.certify_hermitian();
  return inc;
}

} // namespace mhdm
