#include "mhdm/quintic.hpp"

#include "mhdm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mhdm {

namespace {

constexpr double kTrimRel = 1e-14;
constexpr double kRealness = 1e-8;
constexpr double kMergeRel = 1e-8;
constexpr int kPolishSteps = 12;

} // namespace

double RealPolynomial::operator()(double x) const {
  double acc = 0.0;
  for (int i = 5; i >= 0; --i) acc = acc * x + coeffs[static_cast<std::size_t>(i)];
  return acc;
}

double RealPolynomial::derivative(double x) const {
  double acc = 0.0;
  for (int i = 5; i >= 1; --i) acc = acc * x + i * coeffs[static_cast<std::size_t>(i)];
  return acc;
}

double RealPolynomial::max_abs_coeff() const {
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  return peak;
}

int RealPolynomial::degree() const {
  const double peak = max_abs_coeff();
  if (peak == 0.0) return -1;
  for (int i = 5; i >= 0; --i) {
    if (std::abs(coeffs[static_cast<std::size_t>(i)]) > kTrimRel * peak) return i;
  }
  return -1;
}

double root_residual_bound(const RealPolynomial& p, double x) {
  return 1e-8 * (1.0 + p.max_abs_coeff()) * std::pow(1.0 + std::abs(x), 5);
}

std::vector<double> real_roots(const RealPolynomial& p) {
  for (double c : p.coeffs) {
    if (!std::isfinite(c)) throw InvalidArgument("real_roots: non-finite coefficient");
  }
  const int deg = p.degree();
  if (deg < 0) throw ZeroPolynomial("real_roots: all coefficients are zero");

  // Trimmed coefficients; exact zeros at the low end are roots at the origin.
  std::vector<double> c(p.coeffs.begin(), p.coeffs.begin() + deg + 1);
  std::vector<double> roots;
  std::size_t low = 0;
  while (low < c.size() - 1 && c[low] == 0.0) ++low;
  if (low > 0) {
    roots.push_back(0.0);
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(low));
  }
  const int d = static_cast<int>(c.size()) - 1;

  // Substitute x = scale * t so that the monic polynomial in t has
  // coefficients of modulus <= 1 (Fujiwara-type bound on the roots).
  double scale = 0.0;
  if (d >= 1) {
    const double lead = c[static_cast<std::size_t>(d)];
    for (int i = 0; i < d; ++i) {
      const double ratio = std::abs(c[static_cast<std::size_t>(i)] / lead);
      if (ratio > 0.0) scale = std::max(scale, std::pow(ratio, 1.0 / (d - i)));
    }
  }
  if (scale == 0.0) scale = 1.0;

  if (d == 1) {
    roots.push_back(-c[0] / c[1]);
  } else if (d >= 2) {
    const double lead = c[static_cast<std::size_t>(d)];

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) {
      companion(i, d - 1) = -c[static_cast<std::size_t>(i)] / (lead * std::pow(scale, d - i));
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw Error("real_roots: eigenvalue iteration did not converge");
    }
    for (int i = 0; i < d; ++i) {
      const std::complex<double> ev = solver.eigenvalues()[i];
      if (std::abs(ev.imag()) <= kRealness * (1.0 + std::abs(ev.real()))) {
        roots.push_back(ev.real() * scale);
      }
    }
  }

  // Newton polish against the untrimmed polynomial; a step is kept only when
  // it lowers the residual.
  for (double& x : roots) {
    double fx = std::abs(p(x));
    for (int it = 0; it < kPolishSteps && fx > 0.0; ++it) {
      const double dfx = p.derivative(x);
      if (dfx == 0.0 || !std::isfinite(dfx)) break;
      const double next = x - p(x) / dfx;
      const double fnext = std::abs(p(next));
      if (!(fnext < fx)) break;
      x = next;
      fx = fnext;
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double x : roots) {
    if (!merged.empty() && std::abs(x - merged.back()) <= kMergeRel * (scale + std::abs(x))) {
      if (std::abs(p(x)) < std::abs(p(merged.back()))) merged.back() = x;
      continue;
    }
    merged.push_back(x);
  }
  return merged;
}

} // namespace mhdm
