#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dln {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered positive singular values s_1 >= ... >= s_d > 0.
class SingularSpectrum {
 public:
  /// Throws NonFinite / NonPositive / InvalidArgument if the values are not a
  /// nonincreasing list of finite positive reals.
  explicit SingularSpectrum(std::vector<double> values);
  explicit SingularSpectrum(const Vector& values);
  SingularSpectrum(std::initializer_list<double> values) : SingularSpectrum(std::vector<double>(values)) {}

  /// Sorts a multiset of positive values into chamber order.
  static SingularSpectrum from_unordered(std::vector<double> values);
  /// (s, ..., s) with d copies.
  static SingularSpectrum constant(double s, int d);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const noexcept { return values_; }
  Vector as_vector() const;

 private:
  std::vector<double> values_;
};

/// Network depth: a finite integer N >= 2 or the infinite-depth limit.
class Depth {
 public:
  static Depth finite(int n);
  static Depth infinite() { return Depth(0); }
  /// Accepts an integer or "inf".
  static Depth parse(const std::string& text);

  bool is_finite() const noexcept { return n_ != 0; }
  /// Throws Unsupported for infinite depth.
  int n() const;
  /// 1/N, and 0 in the infinite-depth limit.
  double inverse() const noexcept { return n_ == 0 ? 0.0 : 1.0 / n_; }
  std::string label() const;

  bool operator==(const Depth&) const = default;

 private:
  explicit Depth(int n) : n_(n) {}
  int n_;
};

struct SvdTriple {
  Matrix u;
  SingularSpectrum sigma;
  Matrix v;

  Matrix recompose() const;
};

/// Full SVD of a square matrix with descending singular values. Each left
/// singular vector is signed so that its largest-magnitude entry is
/// nonnegative; the matching right vector is flipped with it.
SvdTriple svd(const Matrix& x);

/// Throws RankDeficient when sigma_min < 1e-14 * sigma_max.
void require_full_rank(const SingularSpectrum& sigma);

/// sigma_star * q for an orthogonal q.
Matrix orbit_point(const Matrix& q, double sigma_star);

/// Frobenius distance from x to the nearest point sigma_star * U V^T of the
/// orbit sigma_star * O(d).
double orbit_distance(const Matrix& x, double sigma_star);

}  // namespace dln
