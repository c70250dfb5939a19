// Acceptance gate: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include "dln/analysis.hpp"
#include "dln/cli.hpp"
#include "dln/entropy.hpp"
#include "dln/equilibrium.hpp"
#include "dln/error.hpp"
#include "dln/flows.hpp"
#include "dln/geometry.hpp"
#include "dln/quadrature.hpp"
#include "dln/sampling.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dln;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const Depth kDepths[] = {Depth::finite(2), Depth::finite(3), Depth::finite(5), Depth::finite(10),
                         Depth::infinite()};

std::optional<int> as_oracle(Depth depth) {
  if (depth.is_finite()) return depth.n();
  return std::nullopt;
}

// Fourth-order mixed second differences of the oracle entropy.
Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& x) {
  const Eigen::Index d = x.size();
  const double w[] = {1.0, -8.0, 8.0, -1.0};
  const double o[] = {-2.0, -1.0, 1.0, 2.0};
  Matrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double hi = 1e-3 * x(i);
      const double hj = 1e-3 * x(j);
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          Vector y = x;
          y(i) += o[a] * hi;
          y(j) += o[b] * hj;
          acc += w[a] * w[b] * f(y);
        }
      }
      h(i, j) = acc / (144.0 * hi * hj);
    }
  }
  return h;
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  double worst_grad = 0.0;
  double worst_hess = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 5;
    const Depth depth = kDepths[(trial / 5) % 5];
    const SingularSpectrum s = random_spectrum(rng, d);
    const auto f = [&](const Vector& x) { return oracle::entropy(x, as_oracle(depth)); };
    const Vector fd = oracle::fd_gradient(f, s.as_vector());
    worst_grad = std::max(worst_grad, oracle::relative_error(entropy_grad(s, depth), fd));
    const Matrix fh = fd_hessian(f, s.as_vector());
    worst_hess = std::max(worst_hess, (entropy_hessian(s, depth) - fh).cwiseAbs().maxCoeff());
  }
  return {worst_grad <= 1e-6 && worst_hess <= 1e-5,
          fmt::format("100 spectra: max grad rel err {:.2e} (<= 1e-6), max hess abs err {:.2e} (<= 1e-5)",
                      worst_grad, worst_hess)};
}

Outcome criterion2() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    const int d = 2 + done % 5;
    const SingularSpectrum s = random_spectrum(rng, d);
    bool distinct = true;
    for (int i = 0; i + 1 < d; ++i) distinct = distinct && (s[i] - s[i + 1]) > 1e-2 * s[i];
    if (!distinct) continue;
    const Matrix x = random_matrix_with_spectrum(rng, s);
    worst = std::max(worst, submersion_residual(x, Depth::finite(2 + done % 9), 10, done));
    ++done;
  }
  return {worst <= 1e-9, fmt::format("100 matrices: max residual {:.2e} (<= 1e-9)", worst)};
}

struct LevelRun {
  std::vector<double> times;
  std::vector<SingularSpectrum> sigma;
  std::vector<Matrix> polar;
};

LevelRun run_level(FlowLevel level, const Vector& y0, int n, double tmax) {
  const FlowProblem prob{SpectralEnergy::schatten(2), Depth::finite(n), 1.0, level, 3};
  IntegrateOptions opts;
  opts.rtol = 1e-10;
  opts.atol = 1e-12;
  opts.stop_on_convergence = false;
  opts.step_to_samples = true;
  opts.sample_times = linspace(0.0, tmax, 101);
  const Trajectory traj = integrate(prob, y0, 0.0, tmax, opts);
  LevelRun out;
  out.times = traj.times;
  for (const auto& y : traj.states) {
    out.sigma.push_back(state_spectrum(y, prob));
    if (level == FlowLevel::Matrix) {
      const auto f = svd(unflatten(y, 3));
      out.polar.push_back(f.u * f.v.transpose());
    }
  }
  return out;
}

Outcome criterion3(LevelRun& matrix_run) {
  const auto start = Clock::now();
  const int n = 3;
  std::mt19937_64 rng(103);
  const SingularSpectrum s0({1.2, 0.7, 0.4});
  const Matrix x0 = random_matrix_with_spectrum(rng, s0);
  Vector lambda0(3);
  for (int i = 0; i < 3; ++i) lambda0(i) = std::pow(s0[i], 1.0 / n);

  matrix_run = run_level(FlowLevel::Matrix, flatten(x0), n, 10.0);
  const LevelRun chamber = run_level(FlowLevel::Chamber, s0.as_vector(), n, 10.0);
  const LevelRun lambda = run_level(FlowLevel::Lambda, lambda0, n, 10.0);
  double worst = 0.0;
  bool aligned = matrix_run.times.size() == 101 && chamber.times.size() == 101 && lambda.times.size() == 101;
  for (std::size_t k = 0; aligned && k < 101; ++k) {
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::abs(matrix_run.sigma[k][i] - chamber.sigma[k][i]));
      worst = std::max(worst, std::abs(lambda.sigma[k][i] - chamber.sigma[k][i]));
    }
  }
  const double elapsed = seconds_since(start);
  return {aligned && worst <= 1e-6 && elapsed < 10.0,
          fmt::format("(N,p,beta,d)=(3,2,1,3), t in [0,10]: sup |sigma diff| {:.2e} (<= 1e-6), {:.2f} s (< 10 s)",
                      worst, elapsed)};
}

Outcome criterion4(const LevelRun& matrix_run) {
  if (matrix_run.polar.empty()) return {false, "matrix trajectory unavailable"};
  double worst = 0.0;
  for (const auto& p : matrix_run.polar) worst = std::max(worst, (p - matrix_run.polar.front()).norm());
  return {worst <= 1e-6,
          fmt::format("{} samples: max ||U V^T(t) - U V^T(0)||_F {:.2e} (<= 1e-6)", matrix_run.polar.size(), worst)};
}

Outcome criterion5() {
  const FlowProblem prob{SpectralEnergy::schatten(2), Depth::finite(10), 5.0, FlowLevel::Chamber, 2};
  const double star = solve_balance(prob.energy, 5.0, Depth::finite(10), 2).sigma_star;
  Vector y0(2);
  y0 << 0.6, 0.1;
  const Trajectory traj = integrate(prob, y0, 0.0, 200.0);
  const double miss = (traj.states.back().array() - 0.3).abs().maxCoeff();
  double worst = 0.0;
  int cases = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (Depth depth : {Depth::finite(2), Depth::finite(5), Depth::finite(10), Depth::infinite()}) {
      for (double beta : {0.1, 1.0, 10.0}) {
        for (int d = 2; d <= 6; ++d) {
          const double bis = solve_balance(SpectralEnergy::schatten(p), beta, depth, d).sigma_star;
          const double closed = schatten_sigma_star(p, beta, depth, d);
          worst = std::max(worst, std::abs(bis - closed) / closed);
          ++cases;
        }
      }
    }
  }
  return {std::abs(star - 0.3) <= 1e-15 && miss <= 1e-6 && worst <= 1e-12,
          fmt::format("sigma* = {:.17g}; terminal |sigma - 0.3| {:.2e} (<= 1e-6); bisection vs closed form over {} "
                      "cases {:.2e} (<= 1e-12)",
                      star, miss, cases, worst)};
}

std::vector<double> sorted_real_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(es.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

// Largest relative mismatch between sorted eigenvalues and the predicted multiset.
double spectrum_mismatch(std::vector<double> got, std::vector<double> want, double scale) {
  std::sort(want.begin(), want.end());
  if (got.size() != want.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  return worst;
}

double fitted_rate(const FlowProblem& prob, const Vector& y0, double star, bool along_one, double horizon) {
  IntegrateOptions opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-15;
  opts.stop_on_convergence = false;
  opts.step_to_samples = true;
  opts.sample_times = linspace(0.0, horizon, 201);
  const Trajectory traj = integrate(prob, y0, 0.0, horizon, opts);
  std::vector<double> t, y;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < 0.2 * horizon) continue;
    const Vector& s = traj.states[k];
    t.push_back(traj.times[k]);
    y.push_back(along_one ? s.mean() - star : s(0) - s(s.size() - 1));
  }
  return oracle::fit_log_slope(t, y);
}

Outcome criterion6() {
  double jac_worst = 0.0;
  double fit_worst = 0.0;
  struct Case {
    int n;
    double p;
    double beta;
    int d;
  };
  for (const Case c : {Case{3, 2, 1, 2}, Case{10, 2, 5, 2}, Case{4, 3, 2, 3}, Case{2, 1.5, 1, 4}}) {
    const auto energy = SpectralEnergy::schatten(c.p);
    const Depth depth = Depth::finite(c.n);
    const RateSpectrum rates = matrix_rate_spectrum(energy, c.beta, depth, c.d);
    const double star = rates.sigma_star;
    const double scale = std::abs(rates.rho_one);

    const FlowProblem chamber{energy, depth, c.beta, FlowLevel::Chamber, c.d};
    const Matrix jc = oracle::fd_jacobian([&](const Vector& x) { return chamber_flow_rhs(x, chamber); },
                                          Vector::Constant(c.d, star));
    std::vector<double> want_c(static_cast<std::size_t>(c.d - 1), rates.rho_perp);
    want_c.push_back(rates.rho_one);
    jac_worst = std::max(jac_worst, spectrum_mismatch(sorted_real_eigenvalues(jc), want_c, scale));

    const FlowProblem matrix{energy, depth, c.beta, FlowLevel::Matrix, c.d};
    const Matrix jm = oracle::fd_jacobian([&](const Vector& x) { return flow_rhs(x, matrix); },
                                          flatten(star * Matrix::Identity(c.d, c.d)));
    std::vector<double> want_m(static_cast<std::size_t>(rates.zero_dim), 0.0);
    want_m.insert(want_m.end(), static_cast<std::size_t>(rates.multiplicity_perp), rates.rho_perp);
    want_m.push_back(rates.rho_one);
    jac_worst = std::max(jac_worst, spectrum_mismatch(sorted_real_eigenvalues(jm), want_m, scale));

    const double eps = 1e-4 * star;
    const double fit_one =
        fitted_rate(chamber, Vector::Constant(c.d, star + eps), star, true, 4.0 / std::abs(rates.rho_one));
    Vector split = Vector::Constant(c.d, star);
    split(0) += eps;
    split(c.d - 1) -= eps;
    const double fit_perp = fitted_rate(chamber, split, star, false, 4.0 / std::abs(rates.rho_perp));
    fit_worst = std::max(fit_worst, std::abs(fit_one / rates.rho_one - 1.0));
    fit_worst = std::max(fit_worst, std::abs(fit_perp / rates.rho_perp - 1.0));
  }
  return {jac_worst <= 1e-5 && fit_worst <= 0.02,
          fmt::format("4 cases, chamber and matrix: Jacobian spectrum rel err {:.2e} (<= 1e-5); decay fits rel "
                      "err {:.2e} (<= 2%)",
                      jac_worst, fit_worst)};
}

Outcome criterion7() {
  double worst = 0.0;
  double log_worst = 0.0;
  struct Case {
    int n;
    double p;
  };
  for (const Case c : {Case{2, 1}, Case{2, 2}, Case{10, 2}}) {
    const FlowProblem prob{SpectralEnergy::schatten(c.p), Depth::finite(c.n), 5.0, FlowLevel::DiagonalScalar, 2};
    const QuadratureParams params = quadrature_params(prob);
    const double kappa = params.nu * std::pow(params.s_star, params.nu - 2.0);
    const double tmax = 3.0 / kappa;
    IntegrateOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    opts.stop_on_convergence = false;
    opts.step_to_samples = true;
    opts.sample_times = linspace(0.0, tmax, 200);
    const Trajectory traj = integrate_scalar(params, 0.3 * params.s_star, tmax, opts);
    worst = std::max(worst, quadrature_residual(traj, params));
    if (params.nu == 2.0) {
      const auto closed = [&](double s) { return -0.5 * std::log1p(-std::pow(s / params.s_star, 2)); };
      const double base = closed(traj.states.front()(0));
      for (std::size_t k = 0; k < traj.times.size(); ++k)
        log_worst = std::max(log_worst, std::abs(traj.times[k] - (closed(traj.states[k](0)) - base)));
    }
  }
  return {worst <= 1e-8 && log_worst <= 1e-10,
          fmt::format("nu in {{2,4,20}}, s0 = 0.3 s*, rtol 1e-10: max residual {:.2e} (<= 1e-8); nu=2 log closed "
                      "form {:.2e} (<= 1e-10)",
                      worst, log_worst)};
}

Outcome criterion8() {
  std::mt19937_64 rng(108);
  int nd = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const int d = 2 + static_cast<int>(rng() % 5);
    if (euclidean_definiteness(random_spectrum(rng, d), Depth::finite(n)).classification ==
        Definiteness::NegativeDefinite)
      ++nd;
  }
  int nd2 = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 3 + trial % 4;
    if (euclidean_definiteness(random_spectrum(rng, d), Depth::finite(2)).classification ==
        Definiteness::NegativeDefinite)
      ++nd2;
  }
  int rank_one = 0;
  double kernel_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = euclidean_definiteness(random_spectrum(rng, 2), Depth::finite(2));
    if (r.classification == Definiteness::NegativeSemidefinite && r.rank == 1 && r.kernel.cols() == 1) {
      ++rank_one;
      kernel_err = std::max(kernel_err, std::abs(r.kernel(0, 0) + r.kernel(1, 0)));
    }
  }
  double delta_err = 0.0;
  for (int n = 3; n <= 12; ++n) {
    const double want = (n - 2.0) * (n - 1.0) * (n - 1.0) / (12.0 * n * n * n);
    delta_err = std::max(delta_err, std::abs(delta(1.0, Depth::finite(n)) - want));
  }
  return {nd == 500 && nd2 == 100 && rank_one == 100 && kernel_err <= 1e-10 && delta_err <= 1e-12,
          fmt::format("N>2: {}/500 NegativeDefinite; N=2,d>=3: {}/100 NegativeDefinite; (2,2): {}/100 rank-one "
                      "with kernel (1,-1) err {:.1e}; Delta_N(1) err {:.1e} (<= 1e-12)",
                      nd, nd2, rank_one, kernel_err, delta_err)};
}

Outcome criterion9() {
  int good = 0;
  int total = 0;
  double worst = 0.0;
  for (double s : {0.3, 1.0, 2.0}) {
    for (int d = 2; d <= 6; ++d) {
      for (int n = 2; n <= 10; ++n) {
        const auto r = riemannian_definiteness_at_equal(s, d, Depth::finite(n));
        ++total;
        if (r.report.n_neg == 1 && r.report.n_pos == d - 1 && r.report.n_zero == 0) ++good;
        worst = std::max(worst, r.discrepancy);
      }
    }
  }
  return {good == total && worst <= 1e-10,
          fmt::format("{}/{} points with signature (1 negative, d-1 positive); max |theta - closed form| {:.2e} "
                      "(<= 1e-10)",
                      good, total, worst)};
}

Outcome criterion10() {
  long violations = 0;
  long checks = 0;
  long wrong_equalities = 0;
  for (int n : {2, 3, 4, 5, 7, 10}) {
    const Depth depth = Depth::finite(n);
    const auto skew = audit_skew(depth, 1000, 110 + n);
    violations += skew.violations;
    checks += skew.checks;
    wrong_equalities += n == 2 ? skew.checks - skew.equalities : skew.equalities;
    for (const auto& a : {audit_monotone_summand(depth, 200, 120 + n), audit_kernel_signs(depth, 1000, 130 + n)}) {
      violations += a.violations;
      checks += a.checks;
    }
  }
  std::mt19937_64 rng(140);
  long lyapunov_violations = 0;
  long lyapunov_checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const FlowProblem prob{SpectralEnergy::schatten(uniform(rng, 1.0, 3.0)), Depth::finite(2 + trial % 9),
                           log_uniform(rng, 0.2, 5.0), FlowLevel::Chamber, d};
    IntegrateOptions opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    opts.sample_times = linspace(0.0, 20.0, 200);
    const Trajectory traj = integrate(prob, random_spectrum(rng, d, 0.05, 2.0).as_vector(), 0.0, 20.0, opts);
    double prev = free_energy(prob, traj.states.front());
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const double f = free_energy(prob, traj.states[k]);
      ++lyapunov_checks;
      if (f > prev + 1e-12 * std::max(1.0, std::abs(prev))) ++lyapunov_violations;
      prev = f;
    }
  }
  return {violations == 0 && wrong_equalities == 0 && lyapunov_violations == 0,
          fmt::format("kernel inequalities: {} violations in {} checks, {} misplaced equalities; Lyapunov: {} "
                      "violations in {} steps over 100 trajectories",
                      violations, checks, wrong_equalities, lyapunov_violations, lyapunov_checks)};
}

Outcome criterion11() {
  double worst_formula = 0.0;
  double worst_constraint = 0.0;
  double worst_stationarity = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    for (int d = 2; d <= 6; ++d) {
      for (int n = 2; n <= 10; ++n) {
        const Depth depth = Depth::finite(n);
        const auto sol = dual_solution(p, d, depth);
        const double sigma = std::pow(p / d, 1.0 / p);
        const double lambda = 0.5 * d * (d - 1) * (1.0 - 1.0 / n) / p;
        worst_formula = std::max({worst_formula, std::abs(sol.sigma_star - sigma) / sigma,
                                  std::abs(sol.lambda_star - lambda) / lambda});
        const SingularSpectrum s = SingularSpectrum::constant(sol.sigma_star, d);
        worst_constraint =
            std::max(worst_constraint, std::abs(energy_value(SpectralEnergy::schatten(p), s) - 1.0));
        const Vector lagrange =
            entropy_grad(s, depth) - sol.lambda_star * energy_grad(SpectralEnergy::schatten(p), s);
        worst_stationarity = std::max(worst_stationarity, lagrange.cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst_formula <= 1e-15 && worst_constraint <= 4e-16 && worst_stationarity <= 1e-12,
          fmt::format("225 cases: formula err {:.1e}; |E_p - 1| {:.1e} (rounding only); |grad S - lambda grad E| "
                      "{:.1e}",
                      worst_formula, worst_constraint, worst_stationarity)};
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

Outcome criterion12() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto grid = dir / "dln_acceptance_grid.csv";
  const auto trajs = dir / "dln_acceptance_traj.csv";
  const std::string g = grid.string();
  const std::string t = trajs.string();
  const char* argv[] = {"dln",       "portrait", "--d",    "2",          "--N",   "10",    "--beta",
                        "5",         "--energy", "schatten:p=2", "--grid", "40",    "--out", g.c_str(),
                        "--traj-out", t.c_str()};
  std::ostringstream out, err;
  const auto start = Clock::now();
  const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
  const double elapsed = seconds_since(start);
  if (code != 0) return {false, "dln portrait failed: " + err.str()};

  const auto rows = read_csv(grid);
  const double spacing = 0.6 / 40;
  int zeros = 0;
  int stray = 0;
  for (const auto& r : rows) {
    if (std::hypot(r[2], r[3]) <= 1e-8) {
      ++zeros;
      if (std::max(std::abs(r[0] - 0.3), std::abs(r[1] - 0.3)) > spacing) ++stray;
    }
  }
  std::map<int, std::vector<double>> last;
  for (const auto& r : read_csv(trajs)) last[static_cast<int>(r[0])] = {r[2], r[3]};
  double gap = 0.0;
  double miss = 0.0;
  for (const auto& [id, s] : last) {
    gap = std::max(gap, std::abs(s[0] - s[1]));
    miss = std::max(miss, std::abs(s[0] - 0.3));
  }
  std::filesystem::remove(grid);
  std::filesystem::remove(trajs);
  return {rows.size() == 820 && zeros >= 1 && stray == 0 && !last.empty() && gap <= 1e-6 && miss <= 1e-6 &&
              elapsed < 30.0,
          fmt::format("{} grid points, {} zero(s) of the field, {} away from (0.3,0.3); {} trajectories end with "
                      "|s1-s2| <= {:.1e}, |s-0.3| <= {:.1e}; {:.2f} s (< 30 s)",
                      rows.size(), zeros, stray, last.size(), gap, miss, elapsed)};
}

}  // namespace

int main() {
  LevelRun matrix_run;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient/Hessian oracle", criterion1},
      {"submersion isometry", criterion2},
      {"level equivalence", [&] { return criterion3(matrix_run); }},
      {"frozen frames", [&] { return criterion4(matrix_run); }},
      {"isotropic convergence and balance equation", criterion5},
      {"linear rates and multiplicities", criterion6},
      {"exact diagonal solution", criterion7},
      {"Euclidean Hessian definiteness", criterion8},
      {"Riemannian Hessian signature", criterion9},
      {"kernel inequalities and Lyapunov decrease", criterion10},
      {"dual problem", criterion11},
      {"phase portrait data", criterion12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    fmt::print("[{}] {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
