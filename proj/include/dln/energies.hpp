#pragma once

#include "dln/spectra.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace dln {

/// Scalar function with analytic first and second derivatives.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// E(s) = g(sum_i f(s_i)) with g nondecreasing and f convex. Both conditions
/// are spot-checked at every evaluation point (DomainViolation on failure).
class SpectralEnergy {
 public:
  SpectralEnergy(std::string label, ScalarFunction f, ScalarFunction g,
                 std::optional<double> schatten_p = std::nullopt);

  /// E_p = (1/p) sum s_i^p, i.e. g(s) = s and f(s) = s^p / p. Requires p >= 1.
  static SpectralEnergy schatten(double p);

  const std::string& label() const noexcept { return label_; }
  const ScalarFunction& f() const noexcept { return f_; }
  const ScalarFunction& g() const noexcept { return g_; }
  /// Exponent p when this is a Schatten energy.
  std::optional<double> schatten_exponent() const noexcept { return schatten_p_; }

 private:
  std::string label_;
  ScalarFunction f_;
  ScalarFunction g_;
  std::optional<double> schatten_p_;
};

/// Registry lookup. Recognises "schatten:p=<value>".
SpectralEnergy energy_from_label(std::string_view label);

double energy_value(const SpectralEnergy& e, const SingularSpectrum& sigma);
Vector energy_grad(const SpectralEnergy& e, const SingularSpectrum& sigma);

// Unordered positive values, for use inside flows.
double energy_value(const SpectralEnergy& e, const Vector& sigma);
Vector energy_grad(const SpectralEnergy& e, const Vector& sigma);
Matrix energy_hessian(const SpectralEnergy& e, const Vector& sigma);

/// Hessian of E at (s, ..., s): constant diagonal h1, constant off-diagonal
/// h2, with eigenvalues theta_one = h1 + (d-1) h2 on span{1} and
/// theta_perp = h1 - h2 on its complement.
struct EqualSpectrumHessian {
  double h1 = 0.0;
  double h2 = 0.0;
  double theta_one = 0.0;
  double theta_perp = 0.0;
};

EqualSpectrumHessian energy_hessian_at_equal(const SpectralEnergy& e, double sigma_star, int d);

}  // namespace dln
