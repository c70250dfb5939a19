#pragma once

#include "dln/energies.hpp"
#include "dln/ode.hpp"
#include "dln/spectra.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dln {

enum class FlowLevel { Matrix, Chamber, Lambda, RatioScale, DiagonalScalar };

/// "matrix", "chamber", "lambda", "ratio", "scalar".
std::string_view to_string(FlowLevel level);
FlowLevel parse_level(std::string_view text);

/// Gradient flow of F_beta = E - S / beta. beta = +inf switches the entropy off.
struct FlowProblem {
  SpectralEnergy energy;
  Depth depth;
  double beta;
  FlowLevel level;
  int width;
};

/// Throws InvalidArgument for beta <= 0 (or NaN) and width < 1.
void validate(const FlowProblem& prob);

/// dF/dsigma_i for unordered positive values.
Vector free_energy_grad(const FlowProblem& prob, const Vector& sigma);
double free_energy(const FlowProblem& prob, const Vector& sigma);

/// -A_{N,X}(U diag(dF/dsigma) V^T). Finite depth only.
Matrix matrix_flow_rhs(const Matrix& x, const FlowProblem& prob);

/// -g^{ii} (d_i E - d_i S / beta), g^{ii} = N s^{2-2/N} (s^2 at infinite depth).
Vector chamber_flow_rhs(const Vector& sigma, const FlowProblem& prob);
Vector chamber_flow_rhs(const SingularSpectrum& sigma, const FlowProblem& prob);

/// lambda_i = sigma_i^{1/N}; Schatten energy and finite depth.
Vector lambda_flow_rhs(const Vector& lambda, const FlowProblem& prob);

struct RatioScaleRate {
  Vector du;
  double ds = 0.0;
};

/// lambda_d = s, lambda_i = u_i s. Schatten energy and finite depth.
RatioScaleRate ratio_scale_rhs(const Vector& u, double s, const FlowProblem& prob);

/// Flow restricted to the invariant set u = 1:
/// s' = -s^{Np-1} + (d-1)(1-1/N) / (2 beta s).
double diagonal_scalar_rhs(double s, const FlowProblem& prob);

/// Flattened state layout for a level: matrix entries row-major, chamber
/// sigma, lambda, (u_1..u_{d-1}, s), or (s).
int state_size(FlowLevel level, int width);
Vector flow_rhs(const Vector& state, const FlowProblem& prob);

/// Singular values (chamber order) represented by a state of any level.
SingularSpectrum state_spectrum(const Vector& state, const FlowProblem& prob);
/// Matrix state <-> flat vector.
Vector flatten(const Matrix& x);
Matrix unflatten(const Vector& state, int width);

struct Trajectory {
  FlowLevel level = FlowLevel::Chamber;
  int width = 0;
  std::vector<double> times;
  std::vector<Vector> states;
  TerminalReason terminal_reason = TerminalReason::MaxTime;
  OdeStats stats;
};

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  std::vector<double> sample_times;
  /// Land steps on the sample times instead of interpolating.
  bool step_to_samples = false;
  bool stop_on_convergence = true;
};

/// Checks the level's state invariants on y0, then integrates over [t0, t1].
Trajectory integrate(const FlowProblem& prob, const Vector& y0, double t0, double t1,
                     const IntegrateOptions& options = {});

/// Evenly spaced sample times t0, ..., t1 (count >= 2).
std::vector<double> linspace(double t0, double t1, int count);

/// Column names after "t" for a level.
std::vector<std::string> state_labels(FlowLevel level, int width);
/// CSV with a header line and 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace dln
