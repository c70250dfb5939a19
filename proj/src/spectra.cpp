#include "dln/spectra.hpp"

#include "dln/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

namespace dln {

namespace {

void validate_spectrum(const std::vector<double>& v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(ErrorCode::NonFinite, "singular value is not finite");
    if (v[i] <= 0.0) throw Error(ErrorCode::NonPositive, "singular values must be positive");
    if (i > 0 && v[i] > v[i - 1])
      throw Error(ErrorCode::InvalidArgument, "singular values must be nonincreasing");
  }
}

}  // namespace

SingularSpectrum::SingularSpectrum(std::vector<double> values) : values_(std::move(values)) {
  validate_spectrum(values_);
}

SingularSpectrum::SingularSpectrum(const Vector& values)
    : SingularSpectrum(std::vector<double>(values.data(), values.data() + values.size())) {}

SingularSpectrum SingularSpectrum::from_unordered(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return SingularSpectrum(std::move(values));
}

SingularSpectrum SingularSpectrum::constant(double s, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  return SingularSpectrum(std::vector<double>(static_cast<std::size_t>(d), s));
}

Vector SingularSpectrum::as_vector() const {
  return Eigen::Map<const Vector>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

Depth Depth::finite(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "depth must satisfy N >= 2");
  return Depth(n);
}

Depth Depth::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return infinite();
  int n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument, "depth must be an integer or 'inf': " + text);
  return finite(n);
}

int Depth::n() const {
  if (n_ == 0) throw Error(ErrorCode::Unsupported, "operation requires finite depth");
  return n_;
}

std::string Depth::label() const { return n_ == 0 ? "inf" : std::to_string(n_); }

Matrix SvdTriple::recompose() const {
  return u * sigma.as_vector().asDiagonal() * v.transpose();
}

SvdTriple svd(const Matrix& x) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw Error(ErrorCode::InvalidArgument, "svd expects a nonempty square matrix");
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");

  Eigen::JacobiSVD<Matrix> solver(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = solver.matrixU();
  Matrix v = solver.matrixV();
  const Vector& s = solver.singularValues();
  if (s(s.size() - 1) <= 0.0) throw Error(ErrorCode::RankDeficient, "matrix is singular");

  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index imax = 0;
    u.col(k).cwiseAbs().maxCoeff(&imax);
    if (u(imax, k) < 0.0) {
      u.col(k) = -u.col(k);
      v.col(k) = -v.col(k);
    }
  }
  return SvdTriple{std::move(u), SingularSpectrum(s), std::move(v)};
}

void require_full_rank(const SingularSpectrum& sigma) {
  if (sigma[sigma.size() - 1] < 1e-14 * sigma[0])
    throw Error(ErrorCode::RankDeficient, "smallest singular value below 1e-14 of the largest");
}

Matrix orbit_point(const Matrix& q, double sigma_star) {
  if (q.rows() != q.cols()) throw Error(ErrorCode::InvalidArgument, "orbit_point expects a square matrix");
  if (!q.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  if (!(sigma_star > 0.0)) throw Error(ErrorCode::NonPositive, "orbit scale must be positive");
  const Matrix gram = q.transpose() * q - Matrix::Identity(q.rows(), q.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-10) throw Error(ErrorCode::NotOrthogonal, "q^T q != I");
  return sigma_star * q;
}

double orbit_distance(const Matrix& x, double sigma_star) {
  if (!(sigma_star > 0.0)) throw Error(ErrorCode::NonPositive, "orbit scale must be positive");
  const SvdTriple f = svd(x);
  require_full_rank(f.sigma);
  double sum = 0.0;
  for (double s : f.sigma.values()) sum += (s - sigma_star) * (s - sigma_star);
  return std::sqrt(sum);
}

}  // namespace dln
