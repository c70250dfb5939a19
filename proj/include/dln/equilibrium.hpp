#pragma once

#include "dln/energies.hpp"
#include "dln/spectra.hpp"

namespace dln {

struct EquilibriumReport {
  double sigma_star = 0.0;
  /// |L - R| / max(|L|, |R|) at sigma_star.
  double residual = 0.0;
  int iterations = 0;
};

/// Solves g'(d f(s)) f'(s) = (d-1)(1-1/N) / (2 beta s) by bisection in log s.
/// The bracket starts at [1e-6, 1e2] and grows by factors of 10 inside
/// [1e-12, 1e12] (NoBracket otherwise). DegenerateWidth for d = 1.
EquilibriumReport solve_balance(const SpectralEnergy& e, double beta, Depth depth, int d,
                                double tol = 1e-12);

/// Closed form ((d-1)(1-1/N) / (2 beta))^{1/p} for Schatten-p.
double schatten_sigma_star(double p, double beta, Depth depth, int d);

/// Linearisation of the flow at the isotropic equilibrium. Chamber level:
/// rho_one on span{1} and rho_perp on its complement (multiplicity d-1).
/// Matrix level: additionally a zero block of dimension d(d-1)/2 tangent to
/// the orbit, rho_one on span{X*} and rho_perp with multiplicity d(d+1)/2 - 1.
struct RateSpectrum {
  double sigma_star = 0.0;
  double rho_one = 0.0;
  double rho_perp = 0.0;
  int multiplicity_one = 1;
  int multiplicity_perp = 0;
  int zero_dim = 0;
  bool matrix_level = false;
};

RateSpectrum chamber_rates(const SpectralEnergy& e, double beta, Depth depth, int d);
RateSpectrum matrix_rate_spectrum(const SpectralEnergy& e, double beta, Depth depth, int d);

struct RatePair {
  double rho_one = 0.0;
  double rho_perp = 0.0;
};

/// The same rates with the entropy eigenvalues expanded in (N, d, beta).
RatePair explicit_rates(const SpectralEnergy& e, double sigma_star, double beta, Depth depth, int d);

struct DualSolution {
  double sigma_star = 0.0;
  double lambda_star = 0.0;
};

/// Maximiser of the entropy on {E_p = 1}: sigma* = (p/d)^{1/p} with
/// multiplier (1/p) C(d,2) (1 - 1/N).
DualSolution dual_solution(double p, int d, Depth depth);

}  // namespace dln
