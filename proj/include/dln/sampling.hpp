#pragma once

#include "dln/spectra.hpp"

#include <cstdint>
#include <random>

namespace dln {

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution the result is the same on every standard library.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// exp(uniform(log lo, log hi)).
double log_uniform(std::mt19937_64& rng, double lo, double hi);

/// d log-uniform values in [lo, hi], sorted into chamber order.
SingularSpectrum random_spectrum(std::mt19937_64& rng, int d, double lo = 0.1, double hi = 10.0);

/// Random orthogonal matrix (QR of a matrix with uniform entries in [-1, 1]).
Matrix random_orthogonal(std::mt19937_64& rng, int d);

/// U diag(sigma) V^T with random orthogonal U, V.
Matrix random_matrix_with_spectrum(std::mt19937_64& rng, const SingularSpectrum& sigma);

}  // namespace dln
