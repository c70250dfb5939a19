#include "dln/ode.hpp"

#include "dln/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace dln {

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::MaxTime: return "MaxTime";
    case TerminalReason::Converged: return "Converged";
    case TerminalReason::BoundaryStop: return "BoundaryStop";
    case TerminalReason::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double beta_pi = 0.04;
constexpr double expo1 = 0.2 - beta_pi * 0.75;
constexpr double safety = 0.9;
// The step ratio h_new / h stays inside [fac_min, fac_max].
constexpr double fac_min = 0.2;
constexpr double fac_max = 10.0;

bool recoverable(const Error& e) {
  return e.code() == ErrorCode::NonPositive || e.code() == ErrorCode::NonFinite ||
         e.code() == ErrorCode::RankDeficient;
}

class Stepper {
 public:
  Stepper(const OdeSystem& system, OdeStats& stats) : system_(system), stats_(stats) {}

  // Returns nullopt when the evaluation failed in a recoverable way.
  std::optional<Vector> eval(double t, const Vector& y) {
    ++stats_.rhs_evaluations;
    if (!y.allFinite()) return std::nullopt;
    try {
      Vector f = system_.rhs(t, y);
      if (!f.allFinite()) return std::nullopt;
      return f;
    } catch (const Error& e) {
      if (recoverable(e)) return std::nullopt;
      throw;
    }
  }

 private:
  const OdeSystem& system_;
  OdeStats& stats_;
};

double error_norm(const Vector& err, const Vector& y, const Vector& y1, double rtol, double atol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y(i)), std::abs(y1(i)));
    const double r = err(i) / sk;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

double initial_step(Stepper& stepper, double t0, const Vector& y0, const Vector& f0, double hmax,
                    double rtol, double atol) {
  double dnf = 0.0;
  double dny = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sk = atol + rtol * std::abs(y0(i));
    dnf += (f0(i) / sk) * (f0(i) / sk);
    dny += (y0(i) / sk) * (y0(i) / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  const auto f1 = stepper.eval(t0 + h, y0 + h * f0);
  if (!f1) return std::min(h * 1e-3, hmax);
  double der2 = 0.0;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    const double sk = atol + rtol * std::abs(y0(i));
    der2 += ((*f1)(i) - f0(i)) / sk * (((*f1)(i) - f0(i)) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, hmax});
}

}  // namespace

OdeSolution dopri5(const OdeSystem& system, const Vector& y0, double t0, double t1,
                   const OdeOptions& options) {
  if (!system.rhs) throw Error(ErrorCode::InvalidArgument, "ODE system has no right-hand side");
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
    throw Error(ErrorCode::InvalidArgument, "integration interval must satisfy t0 < t1");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "rtol and atol must be positive");
  if (!y0.allFinite()) throw Error(ErrorCode::NonFinite, "initial state is not finite");

  std::vector<double> samples = options.sample_times;
  std::sort(samples.begin(), samples.end());
  if (!samples.empty() && (samples.front() < t0 || samples.back() > t1))
    throw Error(ErrorCode::InvalidArgument, "sample times must lie inside the integration interval");
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  const bool dense = !samples.empty();

  OdeSolution out;
  Stepper stepper(system, out.stats);

  Vector y = y0;
  if (system.normalize) system.normalize(y);
  double t = t0;
  std::size_t next_sample = 0;

  auto record = [&](double time, Vector state) {
    if (system.normalize) system.normalize(state);
    out.times.push_back(time);
    out.states.push_back(std::move(state));
  };

  if (dense) {
    while (next_sample < samples.size() && samples[next_sample] <= t0) {
      record(samples[next_sample], y);
      ++next_sample;
    }
  } else {
    record(t0, y);
  }

  auto f0 = stepper.eval(t, y);
  if (!f0) throw Error(ErrorCode::NonFinite, "right-hand side cannot be evaluated at the initial state");
  Vector k1 = *f0;

  const double span = t1 - t0;
  const double h_floor = 1e-14 * span;
  double h = options.initial_step > 0.0
                 ? std::min(options.initial_step, span)
                 : initial_step(stepper, t0, y, k1, span, options.rtol, options.atol);
  double facold = 1e-4;
  bool last_rejected = false;
  int quiet_steps = 0;
  const int n = static_cast<int>(y.size());
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y1(n), ystage(n);

  auto finish_boundary = [&](const Vector& state) {
    if (!system.boundary_value) return false;
    return system.boundary_value(state) <= options.boundary_floor;
  };

  if (finish_boundary(y)) {
    out.reason = TerminalReason::BoundaryStop;
    out.final_time = t;
    out.final_state = y;
    return out;
  }

  long steps = 0;
  while (true) {
    if (steps++ >= options.max_steps || h < h_floor) {
      out.reason = TerminalReason::StepFailure;
      break;
    }
    bool last = false;
    bool on_sample = false;
    if (t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    } else if (options.step_to_samples && next_sample < samples.size() &&
               t + 1.01 * h >= samples[next_sample]) {
      h = samples[next_sample] - t;
      on_sample = true;
    }

    // Stages; any recoverable failure rejects the step with a hard cut.
    bool ok = true;
    auto stage = [&](double c, const Vector& state, Vector& k) {
      if (!ok) return;
      auto f = stepper.eval(t + c * h, state);
      if (!f) {
        ok = false;
        return;
      }
      k = std::move(*f);
    };
    ystage = y + h * a21 * k1;
    stage(c2, ystage, k2);
    if (ok) {
      ystage = y + h * (a31 * k1 + a32 * k2);
      stage(c3, ystage, k3);
    }
    if (ok) {
      ystage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      stage(c4, ystage, k4);
    }
    if (ok) {
      ystage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      stage(c5, ystage, k5);
    }
    if (ok) {
      ystage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      stage(1.0, ystage, k6);
    }
    if (ok) {
      y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      stage(1.0, y1, k7);
    }
    if (!ok) {
      ++out.stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const Vector err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = error_norm(err_vec, y, y1, options.rtol, options.atol);
    if (!std::isfinite(err)) {
      ++out.stats.rejected;
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    if (err > 1.0) {
      ++out.stats.rejected;
      h /= std::min(1.0 / fac_min, fac11 / safety);
      last_rejected = true;
      continue;
    }

    // Accepted step.
    ++out.stats.accepted;
    double fac = fac11 / std::pow(facold, beta_pi);
    fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safety));
    double h_new = h / fac;
    facold = std::max(err, 1e-4);
    if (last_rejected) h_new = std::min(h_new, h);
    last_rejected = false;

    const double t_new = last ? t1 : on_sample ? samples[next_sample] : t + h;
    if (on_sample) h_new = std::max(h_new, h);
    if (dense) {
      const Vector ydiff = y1 - y;
      const Vector bspl = h * k1 - ydiff;
      const Vector r4 = ydiff - h * k7 - bspl;
      const Vector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next_sample < samples.size() && samples[next_sample] <= t_new) {
        if (samples[next_sample] == t_new) {
          record(t_new, y1);
          ++next_sample;
          continue;
        }
        const double theta = (samples[next_sample] - t) / h;
        const double theta1 = 1.0 - theta;
        Vector ys = y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
        record(samples[next_sample], std::move(ys));
        ++next_sample;
      }
    }

    t = t_new;
    y = y1;
    k1 = k7;
    if (system.normalize) {
      Vector before = y;
      system.normalize(y);
      if (y != before) {
        auto f = stepper.eval(t, y);
        if (!f) {
          out.reason = TerminalReason::StepFailure;
          break;
        }
        k1 = *f;
      }
    }
    if (!dense) record(t, y);

    if (finish_boundary(y)) {
      out.reason = TerminalReason::BoundaryStop;
      break;
    }
    if (options.converged_steps > 0) {
      quiet_steps = k1.lpNorm<Eigen::Infinity>() <= options.atol ? quiet_steps + 1 : 0;
      if (quiet_steps >= options.converged_steps) {
        out.reason = TerminalReason::Converged;
        break;
      }
    }
    if (last) {
      out.reason = TerminalReason::MaxTime;
      break;
    }
    h = std::min(h_new, t1 - t);
  }

  if (out.times.empty() || t > out.times.back()) record(t, y);
  out.final_time = t;
  out.final_state = y;
  return out;
}

}  // namespace dln
