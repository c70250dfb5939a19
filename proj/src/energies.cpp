#include "dln/energies.hpp"

#include "dln/error.hpp"

#include <cmath>
#include <cstdlib>
#include <fmt/format.h>

namespace dln {

namespace {

void require_positive(const Vector& sigma) {
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!std::isfinite(sigma(i))) throw Error(ErrorCode::NonFinite, "singular value is not finite");
    if (sigma(i) <= 0.0) throw Error(ErrorCode::NonPositive, "singular values must be positive");
  }
}

double inner_sum(const SpectralEnergy& e, const Vector& sigma) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) h += e.f().value(sigma(i));
  return h;
}

void check_g_monotone(const SpectralEnergy& e, double h) {
  if (e.g().d1(h) < 0.0)
    throw Error(ErrorCode::DomainViolation, fmt::format("{}: g' < 0 at {:.17g}", e.label(), h));
}

void check_f_convex(const SpectralEnergy& e, double s) {
  if (e.f().d2(s) < 0.0)
    throw Error(ErrorCode::DomainViolation, fmt::format("{}: f'' < 0 at {:.17g}", e.label(), s));
}

void check_at(const SpectralEnergy& e, const Vector& sigma, double h) {
  check_g_monotone(e, h);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) check_f_convex(e, sigma(i));
}

}  // namespace

SpectralEnergy::SpectralEnergy(std::string label, ScalarFunction f, ScalarFunction g,
                               std::optional<double> schatten_p)
    : label_(std::move(label)), f_(std::move(f)), g_(std::move(g)), schatten_p_(schatten_p) {
  if (!f_.value || !f_.d1 || !f_.d2 || !g_.value || !g_.d1 || !g_.d2)
    throw Error(ErrorCode::InvalidArgument, "spectral energy needs f, f', f'', g, g', g''");
}

SpectralEnergy SpectralEnergy::schatten(double p) {
  if (!std::isfinite(p) || p < 1.0)
    throw Error(ErrorCode::DomainViolation, "Schatten exponent must satisfy p >= 1");
  ScalarFunction f{
      [p](double s) { return std::pow(s, p) / p; },
      [p](double s) { return std::pow(s, p - 1.0); },
      [p](double s) { return (p - 1.0) * std::pow(s, p - 2.0); },
  };
  ScalarFunction g{
      [](double h) { return h; },
      [](double) { return 1.0; },
      [](double) { return 0.0; },
  };
  return SpectralEnergy(fmt::format("schatten:p={}", p), std::move(f), std::move(g), p);
}

SpectralEnergy energy_from_label(std::string_view label) {
  constexpr std::string_view prefix = "schatten:p=";
  if (label.substr(0, prefix.size()) == prefix) {
    const std::string value(label.substr(prefix.size()));
    char* end = nullptr;
    const double p = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
      throw Error(ErrorCode::InvalidArgument, "malformed Schatten exponent: " + value);
    return SpectralEnergy::schatten(p);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown energy label: " + std::string(label));
}

double energy_value(const SpectralEnergy& e, const Vector& sigma) {
  require_positive(sigma);
  const double h = inner_sum(e, sigma);
  check_at(e, sigma, h);
  return e.g().value(h);
}

Vector energy_grad(const SpectralEnergy& e, const Vector& sigma) {
  require_positive(sigma);
  const double h = inner_sum(e, sigma);
  check_at(e, sigma, h);
  const double gp = e.g().d1(h);
  Vector grad(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) grad(i) = gp * e.f().d1(sigma(i));
  return grad;
}

Matrix energy_hessian(const SpectralEnergy& e, const Vector& sigma) {
  require_positive(sigma);
  const double h = inner_sum(e, sigma);
  check_at(e, sigma, h);
  const double gp = e.g().d1(h);
  const double gpp = e.g().d2(h);
  Vector fp(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) fp(i) = e.f().d1(sigma(i));
  Matrix hess = gpp * fp * fp.transpose();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) hess(i, i) += gp * e.f().d2(sigma(i));
  return hess;
}

double energy_value(const SpectralEnergy& e, const SingularSpectrum& sigma) {
  return energy_value(e, sigma.as_vector());
}

Vector energy_grad(const SpectralEnergy& e, const SingularSpectrum& sigma) {
  return energy_grad(e, sigma.as_vector());
}

EqualSpectrumHessian energy_hessian_at_equal(const SpectralEnergy& e, double sigma_star, int d) {
  if (!(sigma_star > 0.0)) throw Error(ErrorCode::NonPositive, "sigma_star must be positive");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  const double h = d * e.f().value(sigma_star);
  check_g_monotone(e, h);
  check_f_convex(e, sigma_star);
  const double fp = e.f().d1(sigma_star);
  const double h2 = e.g().d2(h) * fp * fp;
  const double h1 = h2 + e.g().d1(h) * e.f().d2(sigma_star);
  return EqualSpectrumHessian{h1, h2, h1 + (d - 1) * h2, h1 - h2};
}

}  // namespace dln
