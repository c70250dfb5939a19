#include "dln/equilibrium.hpp"

#include "dln/entropy.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dln {

namespace {

void check_inputs(double beta, int d) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  if (d == 1) throw Error(ErrorCode::DegenerateWidth, "the balance equation degenerates for d = 1");
}

struct Balance {
  const SpectralEnergy& e;
  double drive;  // (d-1)(1-1/N) / (2 beta)
  int d;

  double lhs(double s) const { return energy_grad(e, Vector::Constant(d, s))(0); }
  double rhs(double s) const { return drive / s; }
  double gap(double s) const { return lhs(s) - rhs(s); }
  double residual(double s) const {
    const double l = lhs(s);
    const double r = rhs(s);
    return std::abs(l - r) / std::max({std::abs(l), std::abs(r), 1e-300});
  }
};

}  // namespace

EquilibriumReport solve_balance(const SpectralEnergy& e, double beta, Depth depth, int d, double tol) {
  check_inputs(beta, d);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const Balance balance{e, (d - 1) * (1.0 - depth.inverse()) / (2.0 * beta), d};

  double lo = 1e-6;
  double hi = 1e2;
  while (balance.gap(lo) > 0.0) {
    if (lo <= 1e-12) throw Error(ErrorCode::NoBracket, "no sign change of the balance equation above 1e-12");
    lo = std::max(lo / 10.0, 1e-12);
  }
  while (balance.gap(hi) < 0.0) {
    if (hi >= 1e12) throw Error(ErrorCode::NoBracket, "no sign change of the balance equation below 1e12");
    hi = std::min(hi * 10.0, 1e12);
  }

  EquilibriumReport report;
  if (balance.gap(lo) == 0.0) {
    report.sigma_star = lo;
  } else if (balance.gap(hi) == 0.0) {
    report.sigma_star = hi;
  } else {
    // Gap is increasing: negative at lo, positive at hi.
    while (std::nextafter(lo, hi) < hi) {
      const double mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      ++report.iterations;
      const double g = balance.gap(mid);
      if (g == 0.0) {
        lo = hi = mid;
        break;
      }
      (g < 0.0 ? lo : hi) = mid;
    }
    report.sigma_star = balance.residual(lo) <= balance.residual(hi) ? lo : hi;
  }
  report.residual = balance.residual(report.sigma_star);
  if (report.residual > tol)
    throw Error(ErrorCode::NoConvergence, "bisection stalled above the requested tolerance");
  return report;
}

double schatten_sigma_star(double p, double beta, Depth depth, int d) {
  check_inputs(beta, d);
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainViolation, "Schatten exponent must satisfy p >= 1");
  return std::pow((d - 1) * (1.0 - depth.inverse()) / (2.0 * beta), 1.0 / p);
}

RateSpectrum chamber_rates(const SpectralEnergy& e, double beta, Depth depth, int d) {
  const double s = solve_balance(e, beta, depth, d).sigma_star;
  const EqualSpectrumHessian he = energy_hessian_at_equal(e, s, d);
  const PairKernels lim = pair_kernel_limits(s, depth);
  const double theta_one_s = (d - 1) * (lim.q + lim.p);
  const double theta_perp_s = (d - 1) * lim.q - lim.p;
  const double g = inverse_metric_coefficient(s, depth);

  RateSpectrum out;
  out.sigma_star = s;
  out.rho_one = -g * (he.theta_one - theta_one_s / beta);
  out.rho_perp = -g * (he.theta_perp - theta_perp_s / beta);
  out.multiplicity_one = 1;
  out.multiplicity_perp = d - 1;
  return out;
}

RateSpectrum matrix_rate_spectrum(const SpectralEnergy& e, double beta, Depth depth, int d) {
  RateSpectrum out = chamber_rates(e, beta, depth, d);
  out.matrix_level = true;
  out.zero_dim = d * (d - 1) / 2;
  out.multiplicity_perp = d * (d + 1) / 2 - 1;
  return out;
}

RatePair explicit_rates(const SpectralEnergy& e, double sigma_star, double beta, Depth depth, int d) {
  const EqualSpectrumHessian he = energy_hessian_at_equal(e, sigma_star, d);
  const double k = depth.inverse();
  const double g = inverse_metric_coefficient(sigma_star, depth);
  const double g0 = g / (sigma_star * sigma_star);  // N s^{-2/N}
  return RatePair{
      -g * he.theta_one - g0 * (d - 1) / (2.0 * beta) * (1.0 - k),
      -g * he.theta_perp - g0 / (6.0 * beta) * (2.0 * d - 3.0 - 3.0 * (d - 1) * k + d * k * k),
  };
}

DualSolution dual_solution(double p, int d, Depth depth) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::DomainViolation, "dual problem needs p >= 1");
  if (d < 2) throw Error(ErrorCode::DegenerateWidth, "dual problem needs d >= 2");
  const double pairs = 0.5 * d * (d - 1);
  return DualSolution{std::pow(p / d, 1.0 / p), pairs * (1.0 - depth.inverse()) / p};
}

}  // namespace dln
