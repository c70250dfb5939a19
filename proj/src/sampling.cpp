#include "dln/sampling.hpp"

#include "dln/error.hpp"

#include <cmath>

namespace dln {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "log_uniform needs 0 < lo <= hi");
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

SingularSpectrum random_spectrum(std::mt19937_64& rng, int d, double lo, double hi) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  std::vector<double> values(static_cast<std::size_t>(d));
  for (double& v : values) v = log_uniform(rng, lo, hi);
  return SingularSpectrum::from_unordered(std::move(values));
}

Matrix random_orthogonal(std::mt19937_64& rng, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  const Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  // Fix column signs so q does not depend on the QR sign convention.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Matrix random_matrix_with_spectrum(std::mt19937_64& rng, const SingularSpectrum& sigma) {
  const int d = sigma.size();
  const Matrix u = random_orthogonal(rng, d);
  const Matrix v = random_orthogonal(rng, d);
  return u * sigma.as_vector().asDiagonal() * v.transpose();
}

}  // namespace dln
