#pragma once

// Cancellation-free pair kernels.
//
// Every pairwise quantity of the entropy can be written through
//   G(x) = 1/(1 - e^{-x}) - 1/x,
// which is smooth at x = 0 (G(0) = 1/2, G'(0) = 1/12). With t = log(a/b) and
// k = 1/N (k = 0 in the infinite-depth limit)
//   r(a,b) = H(t)/a,  H(t) = G(2t) - k G(2kt),
// and the Hessian kernels are its partial derivatives
//   p(a,b) = d_b r = -H'(t)/(ab),   q(a,b) = d_a r = (H'(t) - H(t))/a^2.
// The 1/(a-b) singularities cancel analytically, so no threshold switch is
// needed at coincident singular values.

#include <cmath>

namespace dln::detail {

inline double coth_gap(double x) {
  if (std::abs(x) < 0.25) {
    const double x2 = x * x;
    constexpr double c1 = 1.0 / 12.0;
    constexpr double c2 = -1.0 / 720.0;
    constexpr double c3 = 1.0 / 30240.0;
    constexpr double c4 = -1.0 / 1209600.0;
    constexpr double c5 = 1.0 / 47900160.0;
    constexpr double c6 = -691.0 / 1307674368000.0;
    return 0.5 + x * (c1 + x2 * (c2 + x2 * (c3 + x2 * (c4 + x2 * (c5 + x2 * c6)))));
  }
  return 1.0 / (-std::expm1(-x)) - 1.0 / x;
}

inline double coth_gap_derivative(double x) {
  if (std::abs(x) < 0.25) {
    const double x2 = x * x;
    constexpr double c1 = 1.0 / 12.0;
    constexpr double c2 = -3.0 / 720.0;
    constexpr double c3 = 5.0 / 30240.0;
    constexpr double c4 = -7.0 / 1209600.0;
    constexpr double c5 = 9.0 / 47900160.0;
    constexpr double c6 = -11.0 * 691.0 / 1307674368000.0;
    return c1 + x2 * (c2 + x2 * (c3 + x2 * (c4 + x2 * (c5 + x2 * c6))));
  }
  const double sh = std::sinh(0.5 * x);
  return 1.0 / (x * x) - 1.0 / (4.0 * sh * sh);
}

/// log(a/b) computed without cancellation when a ~ b.
inline double log_ratio(double a, double b) { return std::log1p((a - b) / b); }

inline double kernel_h(double t, double k) {
  return coth_gap(2.0 * t) - k * coth_gap(2.0 * k * t);
}

inline double kernel_h_derivative(double t, double k) {
  return 2.0 * coth_gap_derivative(2.0 * t) - 2.0 * k * k * coth_gap_derivative(2.0 * k * t);
}

/// Summand of the entropy gradient, r(a, b).
inline double r_kernel(double a, double b, double k) {
  return kernel_h(log_ratio(a, b), k) / a;
}

inline double p_kernel(double a, double b, double k) {
  return -kernel_h_derivative(log_ratio(a, b), k) / (a * b);
}

inline double q_kernel(double a, double b, double k) {
  const double t = log_ratio(a, b);
  return (kernel_h_derivative(t, k) - kernel_h(t, k)) / (a * a);
}

/// lambda-coordinate pair term a^{2N-1}/(a^{2N}-b^{2N}) - a/(N(a^2-b^2)).
inline double varphi_kernel(double a, double b, int n) {
  const double t = log_ratio(a, b);
  return (coth_gap(2.0 * n * t) - coth_gap(2.0 * t) / n) / a;
}

/// -1/(u^{2N}-1) + 1/(N(u^2-1)), with value (N-1)/(2N) at u = 1.
inline double collision_kernel(double u, int n) {
  const double t = std::log1p(u - 1.0);
  return 1.0 - 1.0 / n - coth_gap(2.0 * n * t) + coth_gap(2.0 * t) / n;
}

}  // namespace dln::detail
