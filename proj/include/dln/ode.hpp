#pragma once

#include "dln/spectra.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace dln {

enum class TerminalReason { MaxTime, Converged, BoundaryStop, StepFailure };

std::string_view to_string(TerminalReason reason);

/// Autonomous or time-dependent system y' = rhs(t, y).
struct OdeSystem {
  std::function<Vector(double, const Vector&)> rhs;
  /// Smallest "positivity" coordinate of a state; the run stops with
  /// BoundaryStop once it drops to the floor. Optional.
  std::function<double(const Vector&)> boundary_value;
  /// Applied to every accepted state (e.g. re-sorting onto the chamber). Optional.
  std::function<void(Vector&)> normalize;
};

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Dense-output times inside [t0, t1]. When empty every accepted step is recorded.
  std::vector<double> sample_times;
  /// Shorten steps so they end exactly on sample times instead of
  /// interpolating between them.
  bool step_to_samples = false;
  /// Stop with Converged once ||rhs||_inf <= atol on this many consecutive
  /// accepted steps. Zero disables the check.
  int converged_steps = 3;
  double boundary_floor = 1e-12;
  /// Initial step; chosen automatically when <= 0.
  double initial_step = 0.0;
  long max_steps = 2'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<Vector> states;
  TerminalReason reason = TerminalReason::MaxTime;
  OdeStats stats;
  double final_time = 0.0;
  Vector final_state;
};

/// Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.
/// A step size below 1e-14 (t1 - t0) ends the run with StepFailure. A stage
/// evaluation that throws NonPositive/NonFinite/RankDeficient is treated as
/// a rejected step.
OdeSolution dopri5(const OdeSystem& system, const Vector& y0, double t0, double t1,
                   const OdeOptions& options = {});

}  // namespace dln
