#include "dln/analysis.hpp"

#include "dln/entropy.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"
#include "dln/sampling.hpp"
#include "kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace dln {

std::string_view to_string(Definiteness c) {
  switch (c) {
    case Definiteness::NegativeDefinite: return "NegativeDefinite";
    case Definiteness::NegativeSemidefinite: return "NegativeSemidefinite";
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::PositiveSemidefinite: return "PositiveSemidefinite";
    case Definiteness::Indefinite: return "Indefinite";
    case Definiteness::Zero: return "Zero";
  }
  return "Unknown";
}

DefinitenessReport classify_symmetric(const Matrix& h, double tolerance) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::InvalidArgument, "matrix must be square");
  if (!h.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  const Matrix sym = 0.5 * (h + h.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);

  DefinitenessReport out;
  out.tolerance = tolerance;
  out.eigenvalues = solver.eigenvalues();
  const double scale = out.eigenvalues.size() ? out.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tolerance * scale;
  std::vector<int> zeros;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    const double lam = out.eigenvalues(i);
    if (std::abs(lam) <= cut) {
      ++out.n_zero;
      zeros.push_back(static_cast<int>(i));
    } else if (lam > 0.0) {
      ++out.n_pos;
    } else {
      ++out.n_neg;
    }
  }
  out.rank = out.n_pos + out.n_neg;
  out.kernel.resize(h.rows(), static_cast<Eigen::Index>(zeros.size()));
  for (std::size_t c = 0; c < zeros.size(); ++c) out.kernel.col(c) = solver.eigenvectors().col(zeros[c]);

  if (out.rank == 0) {
    out.classification = Definiteness::Zero;
  } else if (out.n_pos == 0) {
    out.classification = out.n_zero == 0 ? Definiteness::NegativeDefinite : Definiteness::NegativeSemidefinite;
  } else if (out.n_neg == 0) {
    out.classification = out.n_zero == 0 ? Definiteness::PositiveDefinite : Definiteness::PositiveSemidefinite;
  } else {
    out.classification = Definiteness::Indefinite;
  }
  return out;
}

Matrix hessian_block(double sigma_i, double sigma_j, Depth depth) {
  const PairKernels ij = pair_kernels(sigma_i, sigma_j, depth);
  const PairKernels ji = pair_kernels(sigma_j, sigma_i, depth);
  Matrix b(2, 2);
  b << ij.q, ij.p, ij.p, ji.q;
  return b;
}

Matrix assemble_blocks(const SingularSpectrum& sigma, Depth depth) {
  const int d = sigma.size();
  Matrix out = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Matrix b = hessian_block(sigma[i], sigma[j], depth);
      out(i, i) += b(0, 0);
      out(i, j) += b(0, 1);
      out(j, i) += b(1, 0);
      out(j, j) += b(1, 1);
    }
  }
  return out;
}

double delta(double r, Depth depth) {
  if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "ratio must be finite");
  if (r <= 0.0) throw Error(ErrorCode::OutOfDomain, "delta needs r > 0");
  const PairKernels a = pair_kernels(r, 1.0, depth);
  const PairKernels b = pair_kernels(1.0, r, depth);
  return a.q * b.q - a.p * a.p;
}

double delta_at_one(Depth depth) {
  const double k = depth.inverse();
  return (1.0 - 2.0 * k) * (1.0 - k) * (1.0 - k) / 12.0;
}

DefinitenessReport euclidean_definiteness(const SingularSpectrum& sigma, Depth depth) {
  return classify_symmetric(entropy_hessian(sigma, depth));
}

RiemannianEqualReport riemannian_definiteness_at_equal(double sigma_star, int d, Depth depth) {
  if (!(sigma_star > 0.0)) throw Error(ErrorCode::NonPositive, "sigma_star must be positive");
  if (d < 2) throw Error(ErrorCode::DegenerateWidth, "need d >= 2");
  const double k = depth.inverse();
  const double s2 = sigma_star * sigma_star;

  RiemannianEqualReport out;
  out.theta_one = -(d - 1) * k * (1.0 - k) / (2.0 * s2);
  out.theta_perp = (d / 6.0 - (d - 1) * k / 2.0 + (2.0 * d - 3.0) * k * k / 6.0) / s2;

  const SingularSpectrum sigma = SingularSpectrum::constant(sigma_star, d);
  const Matrix h = riemannian_hessian(sigma, entropy_grad(sigma, depth), entropy_hessian(sigma, depth), depth);
  out.report = classify_symmetric(h);

  std::vector<double> expected(static_cast<std::size_t>(d), out.theta_perp);
  expected[0] = out.theta_one;
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < d; ++i)
    out.discrepancy = std::max(out.discrepancy, std::abs(out.report.eigenvalues(i) - expected[i]));
  return out;
}

double meanfield_kernel(double x, double y, Depth depth) {
  if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorCode::NonPositive, "kernel needs x, y > 0");
  return detail::r_kernel(x, y, depth.inverse());
}

InequalityAudit audit_skew(Depth depth, int samples, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  const double k = depth.inverse();
  InequalityAudit out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double b = log_uniform(rng, 0.1, 10.0);
    const double a = b * log_uniform(rng, 1.01, 10.0);
    const double forward = detail::r_kernel(a, b, k);
    const double backward = detail::r_kernel(b, a, k);
    const double scale = std::max(std::abs(forward), std::abs(backward));
    const double excess = (forward - backward) / scale;
    ++out.checks;
    out.worst = std::max(out.worst, excess);
    if (excess > tolerance) ++out.violations;
    if (std::abs(excess) <= tolerance) ++out.equalities;
  }
  return out;
}

InequalityAudit audit_monotone_summand(Depth depth, int samples, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  const double k = depth.inverse();
  constexpr int rungs = 16;
  InequalityAudit out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double b = log_uniform(rng, 0.1, 10.0);
    std::vector<double> logs(rungs);
    for (double& x : logs) x = uniform(rng, -3.0, 3.0);
    logs.push_back(0.0);  // a = b lies on every ladder
    std::sort(logs.begin(), logs.end());
    double prev = detail::r_kernel(b * std::exp(logs[0]), b, k);
    for (std::size_t i = 1; i < logs.size(); ++i) {
      const double cur = detail::r_kernel(b * std::exp(logs[i]), b, k);
      if (logs[i] == logs[i - 1]) continue;
      const double excess = (cur - prev) / std::max(std::abs(cur), std::abs(prev));
      ++out.checks;
      out.worst = std::max(out.worst, excess);
      if (excess > tolerance) ++out.violations;
      prev = cur;
    }
  }
  return out;
}

InequalityAudit audit_kernel_signs(Depth depth, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  InequalityAudit out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double b = log_uniform(rng, 0.1, 10.0);
    const double a = b * log_uniform(rng, 0.01, 100.0);
    const PairKernels kern = pair_kernels(a, b, depth);
    // Kernels scale like 1/(ab); report the largest normalised value.
    for (double v : {kern.p, kern.q}) {
      ++out.checks;
      out.worst = std::max(out.worst, v * a * b);
      if (v >= 0.0) ++out.violations;
    }
  }
  return out;
}

DeltaAudit audit_delta(Depth depth, int points, double r_max) {
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "delta audit needs at least two grid points");
  if (!(r_max > 1.0)) throw Error(ErrorCode::InvalidArgument, "r_max must exceed 1");
  const bool rank_one = depth.is_finite() && depth.n() == 2;
  DeltaAudit out;
  double prev = delta_at_one(depth);
  out.min_value = prev;
  out.min_increment = std::numeric_limits<double>::infinity();
  out.max_increment = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= points; ++i) {
    const double r = std::exp(std::log(r_max) * i / points);
    const double value = delta(r, depth);
    ++out.checks;
    if (rank_one) {
      const PairKernels a = pair_kernels(r, 1.0, depth);
      if (std::abs(value) > 1e-12 * a.q * a.q) ++out.violations;
    } else {
      if (value <= 0.0) ++out.violations;
    }
    if (value > prev) ++out.increases;
    if (value < prev) ++out.decreases;
    out.min_value = std::min(out.min_value, value);
    out.min_increment = std::min(out.min_increment, value - prev);
    out.max_increment = std::max(out.max_increment, value - prev);
    prev = value;
  }
  return out;
}

}  // namespace dln
