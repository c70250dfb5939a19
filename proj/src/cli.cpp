#include "dln/cli.hpp"

#include "dln/analysis.hpp"
#include "dln/energies.hpp"
#include "dln/entropy.hpp"
#include "dln/equilibrium.hpp"
#include "dln/error.hpp"
#include "dln/flows.hpp"
#include "dln/quadrature.hpp"
#include "dln/sampling.hpp"
#include "json_writer.hpp"
#include "parallel.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace dln::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t default_seed = 42;

std::optional<double> parse_real(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_real(item);
    if (!v || !std::isfinite(*v)) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty() || (!text.empty() && text.back() == ',')) return std::nullopt;
  return out;
}

const CLI::Validator csv_list(
    [](std::string& s) { return parse_list(s) ? std::string{} : "expected a comma-separated list of reals"; },
    "CSV", "csv-list");

const CLI::Validator depth_text(
    [](std::string& s) {
      try {
        Depth::parse(s);
        return std::string{};
      } catch (const Error&) {
        return std::string("expected an integer >= 2 or 'inf'");
      }
    },
    "INT|inf", "depth");

const CLI::Validator beta_text(
    [](std::string& s) {
      const auto v = parse_real(s);
      return v && *v > 0.0 ? std::string{} : "expected a positive real or 'inf'";
    },
    "REAL|inf", "beta");

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

json to_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

json depth_json(Depth depth) {
  if (depth.is_finite()) return depth.n();
  return "inf";
}

json beta_json(double beta) {
  if (std::isinf(beta)) return "inf";
  return beta;
}

json stats_json(const OdeStats& s) {
  return json{{"accepted_steps", s.accepted}, {"rejected_steps", s.rejected}, {"rhs_evaluations", s.rhs_evaluations}};
}

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = to_json_text(report);
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + path);
  file << text;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + path);
  return file;
}

// ---------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string sigma;
  std::string depth;
  double offset = 0.0;
  std::string json_out;
};

void cmd_entropy(const EntropyArgs& a, std::ostream& out) {
  const SingularSpectrum sigma(*parse_list(a.sigma));
  const Depth depth = Depth::parse(a.depth);
  const EntropyValue value = entropy(sigma, depth, a.offset);
  json report;
  report["command"] = "entropy";
  report["inputs"] = {{"sigma", to_json(sigma.values())}, {"N", depth_json(depth)}, {"offset", a.offset}};
  report["value"] = value.value;
  report["constant_offset"] = value.constant_offset;
  report["grad"] = to_json(entropy_grad(sigma, depth));
  report["hess"] = to_json(entropy_hessian(sigma, depth));
  emit(report, a.json_out, out);
}

// ------------------------------------------------------------ equilibrium

struct EquilibriumArgs {
  std::string energy;
  std::string depth;
  int d = 2;
  std::string beta;
  double tol = 1e-12;
  std::string json_out;
};

void cmd_equilibrium(const EquilibriumArgs& a, std::ostream& out) {
  const SpectralEnergy energy = energy_from_label(a.energy);
  const Depth depth = Depth::parse(a.depth);
  const double beta = *parse_real(a.beta);
  const EquilibriumReport eq = solve_balance(energy, beta, depth, a.d, a.tol);
  const RateSpectrum rates = chamber_rates(energy, beta, depth, a.d);
  const RatePair expanded = explicit_rates(energy, eq.sigma_star, beta, depth, a.d);

  json report;
  report["command"] = "equilibrium";
  report["inputs"] = {{"energy", a.energy}, {"N", depth_json(depth)}, {"d", a.d}, {"beta", beta_json(beta)}, {"tol", a.tol}};
  report["sigma_star"] = eq.sigma_star;
  report["residual"] = eq.residual;
  report["iterations"] = eq.iterations;
  report["rho_one"] = rates.rho_one;
  report["rho_perp"] = rates.rho_perp;
  report["rho_one_explicit"] = expanded.rho_one;
  report["rho_perp_explicit"] = expanded.rho_perp;
  report["multiplicities"] = {{"one", rates.multiplicity_one},
                              {"perp", rates.multiplicity_perp},
                              {"matrix_zero", a.d * (a.d - 1) / 2},
                              {"matrix_perp", a.d * (a.d + 1) / 2 - 1}};
  if (const auto p = energy.schatten_exponent())
    report["sigma_star_closed_form"] = schatten_sigma_star(*p, beta, depth, a.d);
  emit(report, a.json_out, out);
}

// ------------------------------------------------------------------- flow

struct FlowArgs {
  std::string level;
  std::string init;
  double tmax = 0.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::string out;
  std::string energy = "schatten:p=2";
  std::string depth = "2";
  std::optional<int> d;
  std::string beta = "1";
  int samples = 200;
  bool run_to_tmax = false;
  std::string json_out;
};

int infer_width(FlowLevel level, std::size_t n, std::optional<int> d) {
  switch (level) {
    case FlowLevel::Matrix: {
      const int w = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      if (static_cast<std::size_t>(w) * w != n)
        throw Error(ErrorCode::InvalidArgument, "matrix --init needs d*d entries");
      if (d && *d != w) throw Error(ErrorCode::InvalidArgument, "--d does not match the matrix --init");
      return w;
    }
    case FlowLevel::Chamber:
    case FlowLevel::Lambda:
    case FlowLevel::RatioScale:
      if (d && *d != static_cast<int>(n)) throw Error(ErrorCode::InvalidArgument, "--d does not match --init");
      return static_cast<int>(n);
    case FlowLevel::DiagonalScalar:
      if (n != 1) throw Error(ErrorCode::InvalidArgument, "scalar --init takes one value");
      if (!d) throw Error(ErrorCode::InvalidArgument, "scalar level needs --d");
      return *d;
  }
  return 0;
}

void cmd_flow(const FlowArgs& a, std::ostream& out) {
  const FlowLevel level = parse_level(a.level);
  const std::vector<double> init = *parse_list(a.init);
  const int width = infer_width(level, init.size(), a.d);
  const FlowProblem prob{energy_from_label(a.energy), Depth::parse(a.depth), *parse_real(a.beta), level, width};
  if (!(a.tmax > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tmax must be positive");
  if (a.samples == 1 || a.samples < 0) throw Error(ErrorCode::InvalidArgument, "--samples must be 0 or at least 2");

  IntegrateOptions opts;
  opts.rtol = a.rtol;
  opts.atol = a.atol;
  if (a.samples > 0) opts.sample_times = linspace(0.0, a.tmax, a.samples);
  opts.stop_on_convergence = !a.run_to_tmax;
  const Vector y0 = Eigen::Map<const Vector>(init.data(), static_cast<Eigen::Index>(init.size()));
  const Trajectory traj = integrate(prob, y0, 0.0, a.tmax, opts);

  {
    std::ofstream file = open_output(a.out);
    write_csv(file, traj);
  }

  const SingularSpectrum sigma0 = state_spectrum(traj.states.front(), prob);
  const SingularSpectrum sigma1 = state_spectrum(traj.states.back(), prob);
  json report;
  report["command"] = "flow";
  report["inputs"] = {{"level", std::string(to_string(level))},
                      {"init", init},
                      {"tmax", a.tmax},
                      {"rtol", a.rtol},
                      {"atol", a.atol},
                      {"energy", a.energy},
                      {"N", depth_json(prob.depth)},
                      {"d", width},
                      {"beta", beta_json(prob.beta)},
                      {"samples", a.samples},
                      {"run_to_tmax", a.run_to_tmax},
                      {"out", a.out}};
  report["terminal_reason"] = std::string(to_string(traj.terminal_reason));
  report["final_time"] = traj.times.back();
  report["final_state"] = to_json(traj.states.back());
  report["final_sigma"] = to_json(sigma1.values());
  report["free_energy_initial"] = free_energy(prob, sigma0.as_vector());
  report["free_energy_final"] = free_energy(prob, sigma1.as_vector());
  report["rows"] = traj.times.size();
  report["stats"] = stats_json(traj.stats);
  emit(report, a.json_out, out);
}

// ------------------------------------------------------------- quadrature

struct QuadratureArgs {
  double nu = 2.0;
  double s_star = 1.0;
  double s0 = 0.5;
  double tmax = 1.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  int samples = 200;
  std::string json_out;
};

void cmd_quadrature(const QuadratureArgs& a, std::ostream& out) {
  const QuadratureParams params{a.nu, a.s_star};
  validate(params);
  if (!(a.s0 > 0.0) || !(a.s0 < a.s_star))
    throw Error(ErrorCode::OutOfDomain, "--s0 must satisfy 0 < s0 < s_star");
  if (!(a.tmax > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tmax must be positive");
  if (a.samples < 2) throw Error(ErrorCode::InvalidArgument, "--samples must be at least 2");
  IntegrateOptions opts;
  opts.rtol = a.rtol;
  opts.atol = a.atol;
  opts.sample_times = linspace(0.0, a.tmax, a.samples);
  opts.stop_on_convergence = false;
  opts.step_to_samples = true;
  const Trajectory traj = integrate_scalar(params, a.s0, a.tmax, opts);

  json report;
  report["command"] = "quadrature";
  report["inputs"] = {{"nu", a.nu}, {"s_star", a.s_star}, {"s0", a.s0}, {"tmax", a.tmax},
                      {"rtol", a.rtol}, {"atol", a.atol}, {"samples", a.samples}};
  report["max_residual"] = quadrature_residual(traj, params);
  if (a.nu == 2.0) {
    // T(s) = -log(1 - (s/s_star)^2) / 2 when nu = 2.
    const auto closed = [&](double s) { return -0.5 * std::log1p(-(s / a.s_star) * (s / a.s_star)); };
    double worst = 0.0;
    const double base = closed(traj.states.front()(0));
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      worst = std::max(worst, std::abs(traj.times[k] - traj.times.front() - (closed(traj.states[k](0)) - base)));
    report["log_closed_form_residual"] = worst;
  }
  report["terminal_reason"] = std::string(to_string(traj.terminal_reason));
  report["final_time"] = traj.times.back();
  report["final_s"] = traj.states.back()(0);
  report["stats"] = stats_json(traj.stats);
  emit(report, a.json_out, out);
}

// ------------------------------------------------------------------ audit

struct AuditArgs {
  std::string mode;
  int n = 2;
  int d = 2;
  int samples = 100;
  std::uint64_t seed = default_seed;
  std::string json_out;
};

json inequality_json(const InequalityAudit& a) {
  return json{{"checks", a.checks}, {"violations", a.violations}, {"equalities", a.equalities}, {"worst", a.worst}};
}

json audit_euclid(const AuditArgs& a, Depth depth) {
  std::mt19937_64 rng(a.seed);
  std::vector<SingularSpectrum> spectra;
  for (int s = 0; s < a.samples; ++s) spectra.push_back(random_spectrum(rng, a.d));
  std::vector<DefinitenessReport> reports(spectra.size());
  parallel_for(spectra.size(), [&](std::size_t i) { reports[i] = euclidean_definiteness(spectra[i], depth); });

  const bool rank_one = a.n == 2 && a.d == 2;
  const Definiteness expected = rank_one ? Definiteness::NegativeSemidefinite : Definiteness::NegativeDefinite;
  long matches = 0;
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  double kernel_misalignment = 0.0;
  json counts = json::object();
  for (const auto& r : reports) {
    const std::string key(to_string(r.classification));
    counts[key] = counts.value(key, 0) + 1;
    bool ok = r.classification == expected;
    if (rank_one) {
      ok = ok && r.rank == 1;
      if (r.kernel.cols() == 1) {
        const double align = std::abs(r.kernel(0, 0) + r.kernel(1, 0)) / std::sqrt(2.0);
        kernel_misalignment = std::max(kernel_misalignment, align);
      }
    }
    matches += ok ? 1 : 0;
    max_eigenvalue = std::max(max_eigenvalue, r.eigenvalues.maxCoeff() / r.eigenvalues.cwiseAbs().maxCoeff());
  }
  json out;
  out["expected"] = std::string(to_string(expected));
  if (rank_one) out["expected_rank"] = 1;
  out["matches"] = matches;
  out["classifications"] = counts;
  out["max_relative_eigenvalue"] = max_eigenvalue;
  if (rank_one) out["kernel_misalignment"] = kernel_misalignment;
  return out;
}

json audit_riemann(const AuditArgs& a, Depth depth) {
  std::mt19937_64 rng(a.seed);
  std::vector<double> scales;
  for (int s = 0; s < a.samples; ++s) scales.push_back(log_uniform(rng, 0.1, 10.0));
  std::vector<RiemannianEqualReport> reports(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    reports[i] = riemannian_definiteness_at_equal(scales[i], a.d, depth);
  });
  long matches = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (r.report.n_neg == 1 && r.report.n_pos == a.d - 1 && r.report.n_zero == 0) ++matches;
    // Eigenvalues scale like 1/s^2; compare on the unit scale.
    worst = std::max(worst, r.discrepancy * scales[i] * scales[i]);
  }
  const RiemannianEqualReport unit = riemannian_definiteness_at_equal(1.0, a.d, depth);
  json out;
  out["expected"] = {{"n_neg", 1}, {"n_pos", a.d - 1}, {"n_zero", 0}};
  out["matches"] = matches;
  out["max_scaled_discrepancy"] = worst;
  out["theta_one_unit"] = unit.theta_one;
  out["theta_perp_unit"] = unit.theta_perp;
  out["classification_unit"] = std::string(to_string(unit.report.classification));
  return out;
}

json audit_blocks(const AuditArgs& a, Depth depth) {
  std::mt19937_64 rng(a.seed);
  std::vector<SingularSpectrum> spectra;
  for (int s = 0; s < a.samples; ++s) spectra.push_back(random_spectrum(rng, a.d));
  std::vector<double> errors(spectra.size());
  parallel_for(spectra.size(), [&](std::size_t i) {
    const Matrix h = entropy_hessian(spectra[i], depth);
    errors[i] = (assemble_blocks(spectra[i], depth) - h).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff();
  });
  const DeltaAudit grid = audit_delta(depth, 400);
  json out;
  out["block_sum_max_relative_error"] = *std::max_element(errors.begin(), errors.end());
  out["delta_at_one"] = delta(1.0, depth);
  out["delta_at_one_closed_form"] = delta_at_one(depth);
  out["delta_grid"] = {{"checks", grid.checks},
                       {"violations", grid.violations},
                       {"increases", grid.increases},
                       {"decreases", grid.decreases},
                       {"min_value", grid.min_value},
                       {"min_increment", grid.min_increment},
                       {"max_increment", grid.max_increment}};
  out["kernel_signs"] = inequality_json(audit_kernel_signs(depth, a.samples, a.seed));
  return out;
}

json audit_skew_mode(const AuditArgs& a, Depth depth) {
  json out;
  out["skew"] = inequality_json(audit_skew(depth, a.samples, a.seed));
  out["monotone_summand"] = inequality_json(audit_monotone_summand(depth, a.samples, a.seed + 1));
  out["equality_expected"] = a.n == 2;
  return out;
}

void cmd_audit(const AuditArgs& a, std::ostream& out) {
  const Depth depth = Depth::finite(a.n);
  if (a.d < 2) throw Error(ErrorCode::DegenerateWidth, "audits need d >= 2");
  if (a.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be positive");
  json report;
  report["command"] = "audit";
  report["inputs"] = {{"mode", a.mode}, {"N", a.n}, {"d", a.d}, {"samples", a.samples}, {"seed", a.seed}};
  report["rng"] = "mt19937_64";
  if (a.mode == "euclid") report["result"] = audit_euclid(a, depth);
  else if (a.mode == "riemann") report["result"] = audit_riemann(a, depth);
  else if (a.mode == "blocks") report["result"] = audit_blocks(a, depth);
  else report["result"] = audit_skew_mode(a, depth);
  emit(report, a.json_out, out);
}

// --------------------------------------------------------------- portrait

struct PortraitArgs {
  int d = 2;
  std::string depth = "10";
  std::string beta = "5";
  std::string energy = "schatten:p=2";
  int grid = 40;
  std::optional<double> sigma_max;
  std::string out;
  std::string traj_out;
  double tmax = 100.0;
  std::string json_out;
};

std::vector<std::vector<int>> chamber_indices(int d, int grid) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 1);
  // All nonincreasing index tuples grid >= i_1 >= ... >= i_d >= 1.
  std::function<void(int, int)> rec = [&](int pos, int upper) {
    if (pos == d) {
      out.push_back(idx);
      return;
    }
    for (int i = upper; i >= 1; --i) {
      idx[pos] = i;
      rec(pos + 1, i);
    }
  };
  rec(0, grid);
  return out;
}

void cmd_portrait(const PortraitArgs& a, std::ostream& out) {
  if (a.d != 2 && a.d != 3) throw Error(ErrorCode::InvalidArgument, "portrait supports d = 2 or 3");
  if (a.grid < 2) throw Error(ErrorCode::InvalidArgument, "--grid must be at least 2");
  const FlowProblem prob{energy_from_label(a.energy), Depth::parse(a.depth), *parse_real(a.beta),
                         FlowLevel::Chamber, a.d};
  validate(prob);
  const double sigma_star = solve_balance(prob.energy, prob.beta, prob.depth, a.d).sigma_star;
  const double sigma_max = a.sigma_max.value_or(2.0 * sigma_star);
  if (!(sigma_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "--sigma-max must be positive");
  const double spacing = sigma_max / a.grid;

  const auto cells = chamber_indices(a.d, a.grid);
  std::vector<Vector> points(cells.size());
  std::vector<Vector> fields(cells.size());
  std::vector<double> energies(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    Vector s(a.d);
    for (int i = 0; i < a.d; ++i) s(i) = sigma_max * cells[c][i] / a.grid;
    points[c] = s;
    fields[c] = chamber_flow_rhs(s, prob);
    energies[c] = free_energy(prob, s);
  });

  {
    std::ofstream file = open_output(a.out);
    for (int i = 1; i <= a.d; ++i) file << (i > 1 ? "," : "") << "σ_" << i;
    for (int i = 1; i <= a.d; ++i) file << ",σ̇_" << i;
    file << ",F_β\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::string line;
      for (int i = 0; i < a.d; ++i) line += fmt::format("{}{:.17g}", i ? "," : "", points[c](i));
      for (int i = 0; i < a.d; ++i) line += fmt::format(",{:.17g}", fields[c](i));
      line += fmt::format(",{:.17g}\n", energies[c]);
      file << line;
    }
  }

  json zeros = json::array();
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (fields[c].norm() <= 1e-8) zeros.push_back(to_json(points[c]));

  // Trajectories from a coarse sub-grid of starting points.
  const int stride = std::max(1, a.grid / 8);
  std::vector<Vector> starts;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    bool keep = true;
    for (int i = 0; i < a.d; ++i) keep = keep && (cells[c][i] % stride == 0);
    if (keep) starts.push_back(points[c]);
  }
  std::vector<Trajectory> trajs(starts.size());
  parallel_for(starts.size(), [&](std::size_t k) {
    IntegrateOptions opts;
    trajs[k] = integrate(prob, starts[k], 0.0, a.tmax, opts);
  });
  double max_spread = 0.0;
  double max_distance = 0.0;
  long converged = 0;
  for (const auto& t : trajs) {
    const Vector& last = t.states.back();
    max_spread = std::max(max_spread, last.maxCoeff() - last.minCoeff());
    max_distance = std::max(max_distance, (last.array() - sigma_star).abs().maxCoeff());
    if (t.terminal_reason == TerminalReason::Converged) ++converged;
  }
  if (!a.traj_out.empty()) {
    std::ofstream file = open_output(a.traj_out);
    file << "trajectory,t";
    for (int i = 1; i <= a.d; ++i) file << ",σ_" << i;
    file << '\n';
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      for (std::size_t r = 0; r < trajs[k].times.size(); ++r) {
        std::string line = fmt::format("{},{:.17g}", k, trajs[k].times[r]);
        for (int i = 0; i < a.d; ++i) line += fmt::format(",{:.17g}", trajs[k].states[r](i));
        file << line << '\n';
      }
    }
  }

  json report;
  report["command"] = "portrait";
  report["inputs"] = {{"d", a.d}, {"N", depth_json(prob.depth)}, {"beta", beta_json(prob.beta)}, {"energy", a.energy},
                      {"grid", a.grid}, {"sigma_max", sigma_max}, {"tmax", a.tmax}, {"out", a.out},
                      {"traj_out", a.traj_out}};
  report["sigma_star"] = sigma_star;
  report["grid_spacing"] = spacing;
  report["points"] = cells.size();
  report["zero_points"] = zeros;
  report["trajectories"] = {{"count", trajs.size()},
                            {"converged", converged},
                            {"max_terminal_spread", max_spread},
                            {"max_terminal_distance", max_distance}};
  emit(report, a.json_out, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy-regularised deep linear network: flows, equilibria and audits", "dln"};
  app.require_subcommand(1);

  EntropyArgs ent;
  auto* s_ent = app.add_subcommand("entropy", "Entropy value, gradient and Hessian of a spectrum");
  s_ent->add_option("--sigma", ent.sigma, "Singular values, nonincreasing")->required()->check(csv_list);
  s_ent->add_option("--N", ent.depth, "Depth")->required()->check(depth_text);
  s_ent->add_option("--offset", ent.offset, "Additive entropy constant")->capture_default_str();
  s_ent->add_option("--json-out", ent.json_out, "Write the JSON report to this file");

  EquilibriumArgs eq;
  auto* s_eq = app.add_subcommand("equilibrium", "Isotropic equilibrium and linear rates");
  s_eq->add_option("--energy", eq.energy, "Energy label, e.g. schatten:p=2")->required();
  s_eq->add_option("--N", eq.depth, "Depth")->required()->check(depth_text);
  s_eq->add_option("--d", eq.d, "Width")->required()->check(CLI::PositiveNumber);
  s_eq->add_option("--beta", eq.beta, "Inverse temperature")->required()->check(beta_text);
  s_eq->add_option("--tol", eq.tol, "Balance residual tolerance")->capture_default_str();
  s_eq->add_option("--json-out", eq.json_out, "Write the JSON report to this file");

  FlowArgs fl;
  auto* s_fl = app.add_subcommand("flow", "Integrate the gradient flow at one coordinate level");
  s_fl->add_option("--level", fl.level, "Coordinate level")
      ->required()
      ->check(CLI::IsMember({"matrix", "chamber", "lambda", "ratio", "scalar"}));
  s_fl->add_option("--init", fl.init, "Initial state (matrix entries row-major)")->required()->check(csv_list);
  s_fl->add_option("--tmax", fl.tmax, "Final time")->required();
  s_fl->add_option("--rtol", fl.rtol, "Relative tolerance")->capture_default_str();
  s_fl->add_option("--atol", fl.atol, "Absolute tolerance")->capture_default_str();
  s_fl->add_option("--out", fl.out, "Trajectory CSV path")->required();
  s_fl->add_option("--energy", fl.energy, "Energy label")->capture_default_str();
  s_fl->add_option("--N", fl.depth, "Depth")->capture_default_str()->check(depth_text);
  s_fl->add_option("--d", fl.d, "Width (required for the scalar level)")->check(CLI::PositiveNumber);
  s_fl->add_option("--beta", fl.beta, "Inverse temperature")->capture_default_str()->check(beta_text);
  s_fl->add_option("--samples", fl.samples, "Evenly spaced output times (0 records every step)")
      ->capture_default_str();
  s_fl->add_flag("--run-to-tmax", fl.run_to_tmax, "Do not stop early on convergence");
  s_fl->add_option("--json-out", fl.json_out, "Write the JSON summary to this file");

  QuadratureArgs qu;
  auto* s_qu = app.add_subcommand("quadrature", "Check the exact time map of the diagonal flow");
  s_qu->add_option("--nu", qu.nu, "Exponent nu = N p")->required();
  s_qu->add_option("--s-star", qu.s_star, "Fixed point s_star")->required();
  s_qu->add_option("--s0", qu.s0, "Initial value, 0 < s0 < s_star")->required();
  s_qu->add_option("--tmax", qu.tmax, "Final time")->required();
  s_qu->add_option("--rtol", qu.rtol, "Relative tolerance")->capture_default_str();
  s_qu->add_option("--atol", qu.atol, "Absolute tolerance")->capture_default_str();
  s_qu->add_option("--samples", qu.samples, "Evenly spaced sample times")->capture_default_str();
  s_qu->add_option("--json-out", qu.json_out, "Write the JSON report to this file");

  AuditArgs au;
  auto* s_au = app.add_subcommand("audit", "Definiteness and inequality audits");
  s_au->add_option("--mode", au.mode, "Audit mode")
      ->required()
      ->check(CLI::IsMember({"euclid", "riemann", "blocks", "skew"}));
  s_au->add_option("--N", au.n, "Depth")->required()->check(CLI::Range(2, 1 << 20));
  s_au->add_option("--d", au.d, "Width")->required()->check(CLI::Range(2, 16));
  s_au->add_option("--samples", au.samples, "Number of random samples")->capture_default_str();
  s_au->add_option("--seed", au.seed, "Seed of the mt19937_64 generator")->capture_default_str();
  s_au->add_option("--json-out", au.json_out, "Write the JSON report to this file");

  PortraitArgs po;
  auto* s_po = app.add_subcommand("portrait", "Chamber vector field on a grid");
  s_po->add_option("--d", po.d, "Width")->required()->check(CLI::IsMember({2, 3}));
  s_po->add_option("--N", po.depth, "Depth")->capture_default_str()->check(depth_text);
  s_po->add_option("--beta", po.beta, "Inverse temperature")->capture_default_str()->check(beta_text);
  s_po->add_option("--energy", po.energy, "Energy label")->capture_default_str();
  s_po->add_option("--grid", po.grid, "Grid points per axis")->capture_default_str();
  s_po->add_option("--sigma-max", po.sigma_max, "Largest grid value (default 2 sigma_star)");
  s_po->add_option("--tmax", po.tmax, "Horizon of the sample trajectories")->capture_default_str();
  s_po->add_option("--out", po.out, "Grid CSV path")->required();
  s_po->add_option("--traj-out", po.traj_out, "Trajectory CSV path");
  s_po->add_option("--json-out", po.json_out, "Write the JSON summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 2;
  }

  try {
    if (s_ent->parsed()) cmd_entropy(ent, out);
    else if (s_eq->parsed()) cmd_equilibrium(eq, out);
    else if (s_fl->parsed()) cmd_flow(fl, out);
    else if (s_qu->parsed()) cmd_quadrature(qu, out);
    else if (s_au->parsed()) cmd_audit(au, out);
    else if (s_po->parsed()) cmd_portrait(po, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace dln::cli
