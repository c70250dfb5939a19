#include "dln/flows.hpp"

#include "dln/entropy.hpp"
#include "dln/error.hpp"
#include "dln/geometry.hpp"
#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <ostream>

namespace dln {

std::string_view to_string(FlowLevel level) {
  switch (level) {
    case FlowLevel::Matrix: return "matrix";
    case FlowLevel::Chamber: return "chamber";
    case FlowLevel::Lambda: return "lambda";
    case FlowLevel::RatioScale: return "ratio";
    case FlowLevel::DiagonalScalar: return "scalar";
  }
  return "unknown";
}

FlowLevel parse_level(std::string_view text) {
  for (FlowLevel level : {FlowLevel::Matrix, FlowLevel::Chamber, FlowLevel::Lambda,
                          FlowLevel::RatioScale, FlowLevel::DiagonalScalar}) {
    if (text == to_string(level)) return level;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown flow level '{}'", text));
}

namespace {

bool entropy_on(const FlowProblem& prob) { return std::isfinite(prob.beta); }

double schatten_p(const FlowProblem& prob) {
  const auto p = prob.energy.schatten_exponent();
  if (!p) throw Error(ErrorCode::Unsupported, "this flow level needs a Schatten energy");
  return *p;
}

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) throw Error(ErrorCode::NonFinite, fmt::format("{} is not finite", what));
    if (v(i) <= 0.0) throw Error(ErrorCode::NonPositive, fmt::format("{} must be positive", what));
  }
}

}  // namespace

void validate(const FlowProblem& prob) {
  if (!(prob.beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (prob.width < 1) throw Error(ErrorCode::InvalidArgument, "width must be at least 1");
}

Vector free_energy_grad(const FlowProblem& prob, const Vector& sigma) {
  Vector grad = energy_grad(prob.energy, sigma);
  if (entropy_on(prob)) grad -= entropy_grad(sigma, prob.depth) / prob.beta;
  return grad;
}

double free_energy(const FlowProblem& prob, const Vector& sigma) {
  double value = energy_value(prob.energy, sigma);
  if (entropy_on(prob)) value -= entropy_value(sigma, prob.depth) / prob.beta;
  return value;
}

Matrix matrix_flow_rhs(const Matrix& x, const FlowProblem& prob) {
  validate(prob);
  if (x.rows() != x.cols()) throw Error(ErrorCode::InvalidArgument, "matrix state must be square");
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "matrix state is not finite");
  const DlnOperator op(x, prob.depth);
  const SvdTriple& f = op.frame();
  const Vector grad = free_energy_grad(prob, f.sigma.as_vector());
  const Matrix differential = f.u * grad.asDiagonal() * f.v.transpose();
  return -op.apply(differential);
}

Vector chamber_flow_rhs(const Vector& sigma, const FlowProblem& prob) {
  validate(prob);
  require_positive(sigma, "singular value");
  const Vector grad = free_energy_grad(prob, sigma);
  Vector out(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    out(i) = -inverse_metric_coefficient(sigma(i), prob.depth) * grad(i);
  return out;
}

Vector chamber_flow_rhs(const SingularSpectrum& sigma, const FlowProblem& prob) {
  return chamber_flow_rhs(sigma.as_vector(), prob);
}

Vector lambda_flow_rhs(const Vector& lambda, const FlowProblem& prob) {
  validate(prob);
  require_positive(lambda, "lambda");
  const int n = prob.depth.n();
  const double p = schatten_p(prob);
  const Eigen::Index d = lambda.size();
  Vector out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double pair = 0.0;
    if (entropy_on(prob)) {
      for (Eigen::Index k = 0; k < d; ++k)
        if (k != i) pair += detail::varphi_kernel(lambda(i), lambda(k), n);
    }
    out(i) = -std::pow(lambda(i), n * p - 1.0) + pair / prob.beta;
  }
  return out;
}

RatioScaleRate ratio_scale_rhs(const Vector& u, double s, const FlowProblem& prob) {
  validate(prob);
  require_positive(u, "ratio");
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "scale is not finite");
  if (s <= 0.0) throw Error(ErrorCode::NonPositive, "scale must be positive");
  const int n = prob.depth.n();
  const double nu = n * schatten_p(prob);
  const double inv_beta = entropy_on(prob) ? 1.0 / prob.beta : 0.0;
  const Eigen::Index m = u.size();

  double collision = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) collision += detail::collision_kernel(u(j), n);

  RatioScaleRate out;
  out.ds = -std::pow(s, nu - 1.0) + inv_beta * collision / s;
  out.du.resize(m);
  const double s_pow = std::pow(s, nu - 2.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    double pair = detail::varphi_kernel(u(i), 1.0, n) - u(i) * collision;
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != i) pair += detail::varphi_kernel(u(i), u(k), n);
    out.du(i) = s_pow * (u(i) - std::pow(u(i), nu - 1.0)) + inv_beta * pair / (s * s);
  }
  return out;
}

double diagonal_scalar_rhs(double s, const FlowProblem& prob) {
  validate(prob);
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "scale is not finite");
  if (s <= 0.0) throw Error(ErrorCode::NonPositive, "scale must be positive");
  const int n = prob.depth.n();
  const double nu = n * schatten_p(prob);
  const double drive = entropy_on(prob)
                           ? (prob.width - 1) * (1.0 - 1.0 / n) / (2.0 * prob.beta)
                           : 0.0;
  return -std::pow(s, nu - 1.0) + drive / s;
}

int state_size(FlowLevel level, int width) {
  switch (level) {
    case FlowLevel::Matrix: return width * width;
    case FlowLevel::Chamber:
    case FlowLevel::Lambda: return width;
    case FlowLevel::RatioScale: return width;
    case FlowLevel::DiagonalScalar: return 1;
  }
  return 0;
}

Vector flatten(const Matrix& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i * x.cols() + j) = x(i, j);
  return out;
}

Matrix unflatten(const Vector& state, int width) {
  if (state.size() != static_cast<Eigen::Index>(width) * width)
    throw Error(ErrorCode::InvalidArgument, "matrix state has the wrong length");
  Matrix x(width, width);
  for (int i = 0; i < width; ++i)
    for (int j = 0; j < width; ++j) x(i, j) = state(i * width + j);
  return x;
}

Vector flow_rhs(const Vector& state, const FlowProblem& prob) {
  if (state.size() != state_size(prob.level, prob.width))
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} state needs {} entries, got {}", to_string(prob.level),
                            state_size(prob.level, prob.width), state.size()));
  switch (prob.level) {
    case FlowLevel::Matrix: return flatten(matrix_flow_rhs(unflatten(state, prob.width), prob));
    case FlowLevel::Chamber: return chamber_flow_rhs(state, prob);
    case FlowLevel::Lambda: return lambda_flow_rhs(state, prob);
    case FlowLevel::RatioScale: {
      const Eigen::Index m = state.size() - 1;
      const RatioScaleRate r = ratio_scale_rhs(state.head(m), state(m), prob);
      Vector out(state.size());
      out.head(m) = r.du;
      out(m) = r.ds;
      return out;
    }
    case FlowLevel::DiagonalScalar: return Vector::Constant(1, diagonal_scalar_rhs(state(0), prob));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown flow level");
}

SingularSpectrum state_spectrum(const Vector& state, const FlowProblem& prob) {
  switch (prob.level) {
    case FlowLevel::Matrix: return svd(unflatten(state, prob.width)).sigma;
    case FlowLevel::Chamber:
      return SingularSpectrum::from_unordered(std::vector<double>(state.data(), state.data() + state.size()));
    case FlowLevel::Lambda: {
      const int n = prob.depth.n();
      std::vector<double> sigma(state.size());
      for (Eigen::Index i = 0; i < state.size(); ++i) sigma[i] = std::pow(state(i), n);
      return SingularSpectrum::from_unordered(std::move(sigma));
    }
    case FlowLevel::RatioScale: {
      const int n = prob.depth.n();
      const Eigen::Index m = state.size() - 1;
      const double s = state(m);
      std::vector<double> sigma(state.size());
      for (Eigen::Index i = 0; i < m; ++i) sigma[i] = std::pow(state(i) * s, n);
      sigma[m] = std::pow(s, n);
      return SingularSpectrum::from_unordered(std::move(sigma));
    }
    case FlowLevel::DiagonalScalar:
      return SingularSpectrum::constant(std::pow(state(0), prob.depth.n()), prob.width);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown flow level");
}

namespace {

void check_initial_state(const FlowProblem& prob, const Vector& y0) {
  if (y0.size() != state_size(prob.level, prob.width))
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} initial state needs {} entries, got {}", to_string(prob.level),
                            state_size(prob.level, prob.width), y0.size()));
  if (!y0.allFinite()) throw Error(ErrorCode::NonFinite, "initial state is not finite");
  switch (prob.level) {
    case FlowLevel::Matrix:
      require_full_rank(svd(unflatten(y0, prob.width)).sigma);
      break;
    case FlowLevel::Chamber:
      static_cast<void>(SingularSpectrum(y0));
      break;
    case FlowLevel::Lambda:
    case FlowLevel::DiagonalScalar:
      require_positive(y0, "initial state");
      break;
    case FlowLevel::RatioScale:
      require_positive(y0, "initial state");
      for (Eigen::Index i = 0; i + 1 < y0.size(); ++i)
        if (y0(i) < 1.0) throw Error(ErrorCode::InvalidArgument, "ratios must satisfy u_i >= 1");
      break;
  }
}

double smallest_singular_value(const Vector& state, int width) {
  const Eigen::JacobiSVD<Matrix> solver(unflatten(state, width));
  return solver.singularValues().minCoeff();
}

}  // namespace

Trajectory integrate(const FlowProblem& prob, const Vector& y0, double t0, double t1,
                     const IntegrateOptions& options) {
  validate(prob);
  check_initial_state(prob, y0);

  OdeSystem system;
  system.rhs = [&prob](double, const Vector& y) { return flow_rhs(y, prob); };
  switch (prob.level) {
    case FlowLevel::Matrix:
      system.boundary_value = [w = prob.width](const Vector& y) { return smallest_singular_value(y, w); };
      break;
    case FlowLevel::Chamber:
      system.boundary_value = [](const Vector& y) { return y.minCoeff(); };
      system.normalize = [](Vector& y) { std::sort(y.data(), y.data() + y.size(), std::greater<>()); };
      break;
    case FlowLevel::Lambda:
    case FlowLevel::DiagonalScalar:
      system.boundary_value = [](const Vector& y) { return y.minCoeff(); };
      break;
    case FlowLevel::RatioScale:
      system.boundary_value = [](const Vector& y) { return y(y.size() - 1); };
      break;
  }

  OdeOptions ode;
  ode.rtol = options.rtol;
  ode.atol = options.atol;
  ode.sample_times = options.sample_times;
  ode.converged_steps = options.stop_on_convergence ? 3 : 0;
  ode.step_to_samples = options.step_to_samples;
  OdeSolution sol = dopri5(system, y0, t0, t1, ode);

  Trajectory traj;
  traj.level = prob.level;
  traj.width = prob.width;
  traj.times = std::move(sol.times);
  traj.states = std::move(sol.states);
  traj.terminal_reason = sol.reason;
  traj.stats = sol.stats;
  return traj;
}

std::vector<double> linspace(double t0, double t1, int count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "linspace needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = t0 + (t1 - t0) * i / (count - 1);
  out.back() = t1;
  return out;
}

std::vector<std::string> state_labels(FlowLevel level, int width) {
  std::vector<std::string> labels;
  switch (level) {
    case FlowLevel::Matrix:
      for (int i = 1; i <= width; ++i)
        for (int j = 1; j <= width; ++j) labels.push_back(fmt::format("x_{}{}", i, j));
      break;
    case FlowLevel::Chamber:
      for (int i = 1; i <= width; ++i) labels.push_back(fmt::format("σ_{}", i));
      break;
    case FlowLevel::Lambda:
      for (int i = 1; i <= width; ++i) labels.push_back(fmt::format("λ_{}", i));
      break;
    case FlowLevel::RatioScale:
      for (int i = 1; i < width; ++i) labels.push_back(fmt::format("u_{}", i));
      labels.emplace_back("s");
      break;
    case FlowLevel::DiagonalScalar:
      labels.emplace_back("s");
      break;
  }
  return labels;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (const auto& label : state_labels(traj.level, traj.width)) os << ',' << label;
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt::format("{:.17g}", traj.times[k]);
    const Vector& y = traj.states[k];
    for (Eigen::Index i = 0; i < y.size(); ++i) os << fmt::format(",{:.17g}", y(i));
    os << '\n';
  }
}

}  // namespace dln
