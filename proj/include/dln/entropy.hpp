#pragma once

#include "dln/spectra.hpp"

namespace dln {

/// Entropy up to the additive constant (N-1) c_d, which is never computed.
/// `value` already includes `constant_offset`.
struct EntropyValue {
  double value = 0.0;
  double constant_offset = 0.0;
};

/// Pairwise kernels: r is the gradient summand, p the off-diagonal Hessian
/// entry and q the diagonal Hessian summand. All are finite at a == b.
struct PairKernels {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

/// sum_{m=0}^{N-1} a^{2(N-1-m)} b^{2m}, i.e. (a^{2N} - b^{2N}) / (a^2 - b^2)
/// without the removable singularity at a == b.
double phi(double a, double b, int n);

/// Pair sum 1/2 sum_{i<j} log phi(s_i^{1/N}, s_j^{1/N}) for finite depth, and
/// the log-ratio renormalised entropy in the infinite-depth limit.
EntropyValue entropy(const SingularSpectrum& sigma, Depth depth, double constant_offset = 0.0);
Vector entropy_grad(const SingularSpectrum& sigma, Depth depth);
Matrix entropy_hessian(const SingularSpectrum& sigma, Depth depth);

// The same quantities for an arbitrary vector of positive values. All of them
// are symmetric functions of the spectrum, so ordering is irrelevant; flows
// use these so intermediate Runge-Kutta stages need not be sorted.
double entropy_value(const Vector& sigma, Depth depth);
Vector entropy_grad(const Vector& sigma, Depth depth);
Matrix entropy_hessian(const Vector& sigma, Depth depth);

PairKernels pair_kernels(double a, double b, Depth depth);

/// Coincidence limits at a == b == sigma.
PairKernels pair_kernel_limits(double sigma, Depth depth);

}  // namespace dln
