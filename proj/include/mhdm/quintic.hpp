#pragma once

#include <array>
#include <vector>

namespace mhdm {

/// Real polynomial of degree at most five, c[0] + c[1] x + ... + c[5] x^5.
struct RealPolynomial {
  std::array<double, 6> coeffs{};

  double operator()(double x) const;
  double derivative(double x) const;
  /// Index of the highest coefficient that survives leading-zero trimming
  /// (|c_i| > 1e-14 max|c|); -1 for the zero polynomial.
  int degree() const;
  double max_abs_coeff() const;
};

/// Every real root of p, ascending. Roots closer than 1e-8 times the root
/// magnitude scale are merged into one entry.
///
/// Roots come from the eigenvalues of the companion matrix (in a rescaled
/// variable) and are Newton-polished on the original coefficients. An
/// eigenvalue counts as real when |Im| <= 1e-8 (1 + |Re|).
///
/// Throws ZeroPolynomial when every coefficient is zero.
std::vector<double> real_roots(const RealPolynomial& p);

/// Acceptance bound for a root: 1e-8 (1 + max|c|) (1 + |x|)^5.
double root_residual_bound(const RealPolynomial& p, double x);

} // namespace mhdm
