#include "dln/geometry.hpp"

#include "dln/entropy.hpp"
#include "dln/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dln {

namespace {

void require_shape(const Matrix& x, const Matrix& p) {
  if (p.rows() != x.rows() || p.cols() != x.cols())
    throw Error(ErrorCode::InvalidArgument, "tangent matrix shape does not match the base point");
  if (!p.allFinite()) throw Error(ErrorCode::NonFinite, "tangent matrix has non-finite entries");
}

SvdTriple full_rank_svd(const Matrix& x) {
  SvdTriple f = svd(x);
  require_full_rank(f.sigma);
  return f;
}

}  // namespace

DlnOperator::DlnOperator(const Matrix& x, Depth depth) : frame_(full_rank_svd(x)) {
  const int n = depth.n();
  const int d = frame_.sigma.size();
  Vector lambda(d);
  for (int i = 0; i < d; ++i) lambda(i) = std::pow(frame_.sigma[i], 1.0 / n);
  eigenvalues_.resize(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) eigenvalues_(k, l) = phi(lambda(k), lambda(l), n);
}

Matrix DlnOperator::apply(const Matrix& p) const {
  require_shape(frame_.u, p);
  const Matrix coeff = frame_.u.transpose() * p * frame_.v;
  return frame_.u * coeff.cwiseProduct(eigenvalues_) * frame_.v.transpose();
}

Matrix DlnOperator::apply_inverse(const Matrix& z) const {
  require_shape(frame_.u, z);
  const Matrix coeff = frame_.u.transpose() * z * frame_.v;
  return frame_.u * coeff.cwiseQuotient(eigenvalues_) * frame_.v.transpose();
}

Matrix apply_A(const Matrix& x, const Matrix& p, Depth depth) { return DlnOperator(x, depth).apply(p); }

Matrix apply_A_inverse(const Matrix& x, const Matrix& z, Depth depth) {
  return DlnOperator(x, depth).apply_inverse(z);
}

double gN_norm_sq(const Matrix& x, const Matrix& z, Depth depth) {
  const Matrix w = apply_A_inverse(x, z, depth);
  return (z.transpose() * w).trace();
}

double inverse_metric_coefficient(double sigma, Depth depth) {
  if (!depth.is_finite()) return sigma * sigma;
  const int n = depth.n();
  return n * std::pow(sigma, 2.0 - 2.0 / n);
}

ChamberMetric chamber_metric(const SingularSpectrum& sigma, Depth depth) {
  Vector diag(sigma.size());
  for (int i = 0; i < sigma.size(); ++i) {
    const double s = sigma[i];
    diag(i) = depth.is_finite() ? std::pow(s, 2.0 * depth.inverse() - 2.0) * depth.inverse()
                                : 1.0 / (s * s);
  }
  return ChamberMetric{depth, sigma, std::move(diag)};
}

Matrix riemannian_hessian(const SingularSpectrum& sigma, const Vector& grad, const Matrix& hess,
                          Depth depth) {
  const int d = sigma.size();
  if (grad.size() != d || hess.rows() != d || hess.cols() != d)
    throw Error(ErrorCode::InvalidArgument, "gradient/Hessian size does not match the spectrum");
  const double factor = 1.0 - depth.inverse();
  Matrix out = hess;
  for (int i = 0; i < d; ++i) out(i, i) += factor * grad(i) / sigma[i];
  return out;
}

double submersion_residual(const Matrix& x, Depth depth, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  const DlnOperator op(x, depth);
  const SvdTriple& f = op.frame();
  const int d = f.sigma.size();
  for (int i = 0; i + 1 < d; ++i) {
    if (f.sigma[i] - f.sigma[i + 1] <= 1e-3 * f.sigma[i])
      throw Error(ErrorCode::DegenerateSpectrum, "singular values must be separated by 1e-3 relative gaps");
  }
  const ChamberMetric metric = chamber_metric(f.sigma, depth);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
    const Matrix lift = f.u * v.asDiagonal() * f.v.transpose();
    const double lifted = (lift.transpose() * op.apply_inverse(lift)).trace();
    const double chamber = metric.diag.dot(v.cwiseProduct(v));
    worst = std::max(worst, std::abs(lifted - chamber) / chamber);
  }
  return worst;
}

}  // namespace dln
