#pragma once

#include "dln/spectra.hpp"

#include <cstdint>

namespace dln {

/// Pushforward of the DLN metric to the chamber. It is diagonal:
/// g_ii = (1/N) s_i^{2/N - 2}, and s_i^{-2} for the rescaled infinite-depth
/// limit N g^N.
struct ChamberMetric {
  Depth depth;
  SingularSpectrum sigma;
  Vector diag;
};

/// The operator A_{N,X}(P) = sum_{k=1}^N (X X^T)^{(N-k)/N} P (X^T X)^{(k-1)/N}.
///
/// In the singular frame X = U S V^T it acts diagonally on u_k v_l^T with
/// eigenvalue phi(s_k^{1/N}, s_l^{1/N}), which equals
/// (s_k^2 - s_l^2)/(s_k^{2/N} - s_l^{2/N}) off the diagonal and N s_k^{2-2/N}
/// on it. A and its inverse share the one factorisation held here.
class DlnOperator {
 public:
  /// Throws RankDeficient for numerically singular x, Unsupported for infinite depth.
  DlnOperator(const Matrix& x, Depth depth);

  Matrix apply(const Matrix& p) const;
  Matrix apply_inverse(const Matrix& z) const;

  const SvdTriple& frame() const noexcept { return frame_; }
  /// Eigenvalue on u_k v_l^T.
  double eigenvalue(int k, int l) const { return eigenvalues_(k, l); }

 private:
  SvdTriple frame_;
  Matrix eigenvalues_;
};

Matrix apply_A(const Matrix& x, const Matrix& p, Depth depth);
Matrix apply_A_inverse(const Matrix& x, const Matrix& z, Depth depth);

/// ||z||^2_{g^N} = tr(z^T A^{-1} z).
double gN_norm_sq(const Matrix& x, const Matrix& z, Depth depth);

ChamberMetric chamber_metric(const SingularSpectrum& sigma, Depth depth);

/// Inverse chamber metric coefficient g^{ii}: N s^{2-2/N}, or s^2 at infinite depth.
double inverse_metric_coefficient(double sigma, Depth depth);

/// Hessian with respect to the chamber metric from the Euclidean gradient and
/// Hessian: hess + diag(((N-1)/N) grad_i / s_i). The factor is 1 at infinite depth.
Matrix riemannian_hessian(const SingularSpectrum& sigma, const Vector& grad, const Matrix& hess,
                          Depth depth);

/// Max relative mismatch between ||U diag(v) V^T||^2_{g^N} and the chamber
/// metric sum g_ii v_i^2 over `trials` random chamber tangents v. Requires
/// relative gaps above 1e-3 (DegenerateSpectrum otherwise).
double submersion_residual(const Matrix& x, Depth depth, int trials, std::uint64_t seed = 0);

}  // namespace dln
