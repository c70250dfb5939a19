#include "dln/entropy.hpp"

#include "dln/error.hpp"
#include "kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dln {

namespace {

void require_positive(const Vector& sigma) {
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!std::isfinite(sigma(i))) throw Error(ErrorCode::NonFinite, "singular value is not finite");
    if (sigma(i) <= 0.0) throw Error(ErrorCode::NonPositive, "singular values must be positive");
  }
}

// log phi(hi^{1/N}, lo^{1/N}) = (2 - 2/N) log hi + log sum_m rho^m,
// rho = (lo/hi)^{2/N} <= 1, so nothing overflows.
double log_phi_sigma(double a, double b, int n) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double rho = std::pow(lo / hi, 2.0 / n);
  double sum = 0.0;
  double term = 1.0;
  for (int m = 0; m < n; ++m) {
    sum += term;
    term *= rho;
  }
  return (2.0 - 2.0 / n) * std::log(hi) + std::log(sum);
}

// log((a^2 - b^2) / (log a^2 - log b^2)) = 2 log hi + log((1 - e^{-x}) / x),
// x = 2 log(hi/lo) >= 0.
double log_ratio_infinite(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  const double x = 2.0 * detail::log_ratio(hi, lo);
  const double shape = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
  return 2.0 * std::log(hi) + std::log(shape);
}

}  // namespace

double phi(double a, double b, int n) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::NonPositive, "phi requires a, b > 0");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "phi requires N >= 1");
  const double a2 = a * a;
  const double b2 = b * b;
  double sum = 0.0;
  double b_pow = 1.0;
  for (int m = 0; m < n; ++m) {
    sum += std::pow(a2, n - 1 - m) * b_pow;
    b_pow *= b2;
  }
  return sum;
}

double entropy_value(const Vector& sigma, Depth depth) {
  require_positive(sigma);
  const Eigen::Index d = sigma.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      total += depth.is_finite() ? log_phi_sigma(sigma(i), sigma(j), depth.n())
                                 : log_ratio_infinite(sigma(i), sigma(j));
    }
  }
  return 0.5 * total;
}

Vector entropy_grad(const Vector& sigma, Depth depth) {
  require_positive(sigma);
  const double k = depth.inverse();
  const Eigen::Index d = sigma.size();
  Vector grad = Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j != i) grad(i) += detail::r_kernel(sigma(i), sigma(j), k);
    }
  }
  return grad;
}

Matrix entropy_hessian(const Vector& sigma, Depth depth) {
  require_positive(sigma);
  const double k = depth.inverse();
  const Eigen::Index d = sigma.size();
  Matrix hess = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double p = detail::p_kernel(sigma(i), sigma(j), k);
      hess(i, j) = p;
      hess(j, i) = p;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j != i) hess(i, i) += detail::q_kernel(sigma(i), sigma(j), k);
    }
  }
  return hess;
}

EntropyValue entropy(const SingularSpectrum& sigma, Depth depth, double constant_offset) {
  return EntropyValue{entropy_value(sigma.as_vector(), depth) + constant_offset, constant_offset};
}

Vector entropy_grad(const SingularSpectrum& sigma, Depth depth) {
  return entropy_grad(sigma.as_vector(), depth);
}

Matrix entropy_hessian(const SingularSpectrum& sigma, Depth depth) {
  return entropy_hessian(sigma.as_vector(), depth);
}

PairKernels pair_kernels(double a, double b, Depth depth) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::NonPositive, "kernels require a, b > 0");
  const double k = depth.inverse();
  return PairKernels{detail::p_kernel(a, b, k), detail::q_kernel(a, b, k), detail::r_kernel(a, b, k)};
}

PairKernels pair_kernel_limits(double sigma, Depth depth) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositive, "kernel limits require sigma > 0");
  const double k = depth.inverse();
  const double s2 = sigma * sigma;
  return PairKernels{
      -(1.0 - k * k) / (6.0 * s2),
      -(1.0 - 1.5 * k + 0.5 * k * k) / (3.0 * s2),
      (1.0 - k) / (2.0 * sigma),
  };
}

}  // namespace dln
