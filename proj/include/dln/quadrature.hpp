#pragma once

#include "dln/flows.hpp"

namespace dln {

/// Diagonal flow s' = -s^{nu-1} + s_star^nu / s with nu = N p.
struct QuadratureParams {
  double nu = 2.0;
  double s_star = 1.0;
};

/// Throws InvalidArgument unless nu >= 2 and s_star > 0.
void validate(const QuadratureParams& params);

/// nu = N p and s_star = sigma_star^{1/N} for a Schatten problem with finite
/// depth and beta, so that s_star^nu = sigma_star^p.
QuadratureParams quadrature_params(const FlowProblem& prob);

/// Gauss hypergeometric series 2F1(a, b; c; z) for real |z| < 1. Above
/// z = 0.9 the logarithmic connection formula is used when c = a + b and the
/// Euler transformation otherwise.
double hyp2f1(double a, double b, double c, double z);

/// T(s) = s^2 / (2 s_star^nu) 2F1(1, 2/nu; 1 + 2/nu; (s/s_star)^nu), the
/// primitive of s / (s_star^nu - s^nu) vanishing at 0. Requires 0 < s < s_star.
double time_map(double s, const QuadratureParams& params);

double diagonal_scalar_rhs(double s, const QuadratureParams& params);

/// Integrates the diagonal flow from s0 over [0, tmax].
Trajectory integrate_scalar(const QuadratureParams& params, double s0, double tmax,
                            const IntegrateOptions& options = {});

/// max_k |(t_k - t_0) - (T(s(t_k)) - T(s(t_0)))| over the samples of a
/// DiagonalScalar trajectory. OutOfDomain if any sample reaches s_star.
double quadrature_residual(const Trajectory& traj, const QuadratureParams& params);

}  // namespace dln
