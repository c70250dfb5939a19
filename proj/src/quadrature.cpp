#include "dln/quadrature.hpp"

#include "dln/error.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <fmt/format.h>

namespace dln {

namespace {

constexpr int max_terms = 100000;
constexpr double series_eps = 1e-16;

bool nonpositive_integer(double c) { return c <= 0.0 && c == std::floor(c); }

double power_series(double a, double b, double c, double z) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= series_eps * std::abs(sum)) return sum;
  }
  throw Error(ErrorCode::NoConvergence,
              fmt::format("2F1({}, {}; {}; {}) did not converge in {} terms", a, b, c, z, max_terms));
}

// c = a + b:
// F = G(c)/(G(a)G(b)) sum_n (a)_n (b)_n / (n!)^2
//       [2 psi(n+1) - psi(a+n) - psi(b+n) - log(1-z)] (1-z)^n
double log_connection(double a, double b, double z) {
  using boost::math::digamma;
  const double w = 1.0 - z;
  const double log_w = std::log1p(-z);
  const double prefactor = std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
  double sum = 0.0;
  double coeff = 1.0;  // (a)_n (b)_n / (n!)^2 w^n
  for (int n = 0; n < max_terms; ++n) {
    const double bracket = 2.0 * digamma(n + 1.0) - digamma(a + n) - digamma(b + n) - log_w;
    const double term = coeff * bracket;
    sum += term;
    if (n > 0 && std::abs(term) <= series_eps * std::abs(sum)) return prefactor * sum;
    coeff *= (a + n) * (b + n) / ((n + 1.0) * (n + 1.0)) * w;
  }
  throw Error(ErrorCode::NoConvergence, "2F1 connection series did not converge");
}

}  // namespace

void validate(const QuadratureParams& params) {
  if (!(params.nu >= 2.0) || !std::isfinite(params.nu))
    throw Error(ErrorCode::InvalidArgument, "nu must be at least 2");
  if (!(params.s_star > 0.0) || !std::isfinite(params.s_star))
    throw Error(ErrorCode::InvalidArgument, "s_star must be positive");
}

QuadratureParams quadrature_params(const FlowProblem& prob) {
  validate(prob);
  const auto p = prob.energy.schatten_exponent();
  if (!p) throw Error(ErrorCode::Unsupported, "the diagonal quadrature needs a Schatten energy");
  if (!std::isfinite(prob.beta)) throw Error(ErrorCode::Unsupported, "the diagonal quadrature needs finite beta");
  if (prob.width < 2) throw Error(ErrorCode::DegenerateWidth, "the diagonal quadrature needs d >= 2");
  const int n = prob.depth.n();
  const double sigma_p = (prob.width - 1) * (1.0 - 1.0 / n) / (2.0 * prob.beta);
  return QuadratureParams{n * *p, std::pow(sigma_p, 1.0 / (n * *p))};
}

double hyp2f1(double a, double b, double c, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z))
    throw Error(ErrorCode::NonFinite, "2F1 arguments must be finite");
  if (nonpositive_integer(c)) throw Error(ErrorCode::OutOfDomain, "2F1 requires c not a nonpositive integer");
  if (std::abs(z) >= 1.0) throw Error(ErrorCode::OutOfDomain, "2F1 series requires |z| < 1");
  if (z < 0.9) return power_series(a, b, c, z);
  if (c - a - b == 0.0 && !nonpositive_integer(a) && !nonpositive_integer(b)) return log_connection(a, b, z);
  return std::pow(1.0 - z, c - a - b) * power_series(c - a, c - b, c, z);
}

double time_map(double s, const QuadratureParams& params) {
  validate(params);
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "s must be finite");
  if (s <= 0.0) throw Error(ErrorCode::NonPositive, "s must be positive");
  if (s >= params.s_star) throw Error(ErrorCode::OutOfDomain, "the time map needs s < s_star");
  const double ratio = s / params.s_star;
  const double z = std::pow(ratio, params.nu);
  const double e = 2.0 / params.nu;
  // s^2 / (2 s_star^nu) written as ratio^2 s_star^{2-nu} / 2.
  return 0.5 * ratio * ratio * std::pow(params.s_star, 2.0 - params.nu) * hyp2f1(1.0, e, 1.0 + e, z);
}

double diagonal_scalar_rhs(double s, const QuadratureParams& params) {
  validate(params);
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "s must be finite");
  if (s <= 0.0) throw Error(ErrorCode::NonPositive, "s must be positive");
  return -std::pow(s, params.nu - 1.0) + std::pow(params.s_star, params.nu) / s;
}

Trajectory integrate_scalar(const QuadratureParams& params, double s0, double tmax,
                            const IntegrateOptions& options) {
  validate(params);
  if (!(s0 > 0.0)) throw Error(ErrorCode::NonPositive, "s0 must be positive");
  OdeSystem system;
  system.rhs = [&params](double, const Vector& y) {
    return Vector::Constant(1, diagonal_scalar_rhs(y(0), params));
  };
  system.boundary_value = [](const Vector& y) { return y(0); };
  OdeOptions ode;
  ode.rtol = options.rtol;
  ode.atol = options.atol;
  ode.sample_times = options.sample_times;
  ode.converged_steps = options.stop_on_convergence ? 3 : 0;
  ode.step_to_samples = options.step_to_samples;
  OdeSolution sol = dopri5(system, Vector::Constant(1, s0), 0.0, tmax, ode);

  Trajectory traj;
  traj.level = FlowLevel::DiagonalScalar;
  traj.width = 1;
  traj.times = std::move(sol.times);
  traj.states = std::move(sol.states);
  traj.terminal_reason = sol.reason;
  traj.stats = sol.stats;
  return traj;
}

double quadrature_residual(const Trajectory& traj, const QuadratureParams& params) {
  if (traj.level != FlowLevel::DiagonalScalar)
    throw Error(ErrorCode::InvalidArgument, "quadrature residual needs a scalar trajectory");
  if (traj.times.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  const double t0 = traj.times.front();
  const double base = time_map(traj.states.front()(0), params);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double elapsed = traj.times[k] - t0;
    const double mapped = time_map(traj.states[k](0), params) - base;
    worst = std::max(worst, std::abs(elapsed - mapped));
  }
  return worst;
}

}  // namespace dln
