#pragma once

#include "dln/spectra.hpp"

#include <cstdint>
#include <string_view>

namespace dln {

enum class Definiteness {
  NegativeDefinite,
  NegativeSemidefinite,
  PositiveDefinite,
  PositiveSemidefinite,
  Indefinite,
  Zero,
};

std::string_view to_string(Definiteness c);

/// Eigenvalues (ascending) of a symmetric matrix and their sign counts.
/// An eigenvalue is zero when |lambda| <= tolerance * max |lambda|.
struct DefinitenessReport {
  Definiteness classification = Definiteness::Zero;
  int rank = 0;
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;
  Vector eigenvalues;
  /// Orthonormal basis of the numerical kernel, one column per zero eigenvalue.
  Matrix kernel;
  double tolerance = 1e-10;
};

DefinitenessReport classify_symmetric(const Matrix& h, double tolerance = 1e-10);

/// [[q(s_i, s_j), p(s_i, s_j)], [p(s_i, s_j), q(s_j, s_i)]].
Matrix hessian_block(double sigma_i, double sigma_j, Depth depth);

/// sum_{i<j} iota_ij B_ij iota_ij^T, which equals the entropy Hessian.
Matrix assemble_blocks(const SingularSpectrum& sigma, Depth depth);

/// q(r,1) q(1,r) - p(r,1)^2 for r > 0 (r is a ratio of singular values).
double delta(double r, Depth depth);
/// (N-2)(N-1)^2 / (12 N^3), the value at r = 1.
double delta_at_one(Depth depth);

DefinitenessReport euclidean_definiteness(const SingularSpectrum& sigma, Depth depth);

struct RiemannianEqualReport {
  double theta_one = 0.0;
  double theta_perp = 0.0;
  /// Classification of the numerically assembled Riemannian Hessian.
  DefinitenessReport report;
  /// Largest gap between its eigenvalues and {theta_one, theta_perp x (d-1)}.
  double discrepancy = 0.0;
};

/// Riemannian Hessian of the entropy at (s, ..., s). Closed forms
/// theta_one = -(d-1)(N-1) / (2 s^2 N^2) and
/// theta_perp = (d/6 - (d-1)/(2N) + (2d-3)/(6N^2)) / s^2 (multiplicity d-1).
RiemannianEqualReport riemannian_definiteness_at_equal(double sigma_star, int d, Depth depth);

/// K_N(x, y) = x/(x^2-y^2) - x^{2/N-1} / (N(x^{2/N}-y^{2/N})), finite at x = y.
double meanfield_kernel(double x, double y, Depth depth);

struct InequalityAudit {
  long checks = 0;
  long violations = 0;
  /// Pairs where both sides agree to the tolerance (skew audit only).
  long equalities = 0;
  /// Largest signed excess over the allowed side, relative to the scale.
  double worst = 0.0;
};

/// r(a,b) - r(b,a) <= 0 for random a > b.
InequalityAudit audit_skew(Depth depth, int samples, std::uint64_t seed, double tolerance = 1e-12);
/// a -> r(a, b) decreasing along random ladders through a = b.
InequalityAudit audit_monotone_summand(Depth depth, int samples, std::uint64_t seed,
                                       double tolerance = 1e-12);
/// p < 0 and q < 0 on random pairs.
InequalityAudit audit_kernel_signs(Depth depth, int samples, std::uint64_t seed);

struct DeltaAudit {
  long checks = 0;
  /// Points where delta is not positive (N > 2) or not zero (N = 2).
  long violations = 0;
  /// Consecutive grid steps along which delta went up or down.
  long increases = 0;
  long decreases = 0;
  double min_value = 0.0;
  double min_increment = 0.0;
  double max_increment = 0.0;
};

/// Sign and monotonicity of delta on a log-spaced grid in (1, r_max].
DeltaAudit audit_delta(Depth depth, int points, double r_max = 100.0);

}  // namespace dln
