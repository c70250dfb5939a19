#include "dln/entropy.hpp"
#include "dln/error.hpp"
#include "dln/sampling.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

using namespace dln;

namespace {

std::optional<int> as_oracle(Depth depth) {
  if (depth.is_finite()) return depth.n();
  return std::nullopt;
}

const Depth kDepths[] = {Depth::finite(2), Depth::finite(3), Depth::finite(5), Depth::finite(10),
                         Depth::infinite()};

}  // namespace

TEST(Phi, DiagonalAndOffDiagonal) {
  EXPECT_DOUBLE_EQ(phi(1.0, 1.0, 2), 2.0);
  EXPECT_DOUBLE_EQ(phi(2.0, 1.0, 2), 5.0);
  EXPECT_DOUBLE_EQ(phi(1.0, 1.0, 5), 5.0);
  EXPECT_NEAR(phi(1.3, 0.7, 4), (std::pow(1.3, 8) - std::pow(0.7, 8)) / (1.3 * 1.3 - 0.49), 1e-13);
}

TEST(Entropy, FrozenValues) {
  EXPECT_EQ(entropy(SingularSpectrum({5.0}), Depth::finite(3)).value, 0.0);
  EXPECT_EQ(entropy(SingularSpectrum({5.0}), Depth::infinite()).value, 0.0);
  EXPECT_NEAR(entropy(SingularSpectrum({2.0, 1.0}), Depth::finite(2)).value, 0.54930614433405485, 1e-15);
  EXPECT_NEAR(entropy(SingularSpectrum({1.0, 1.0}), Depth::finite(3)).value, 0.5 * std::log(3.0), 1e-15);
  // mpmath at 50 digits (tests/support/oracle_values.py).
  EXPECT_NEAR(entropy(SingularSpectrum({3.0, 2.0, 1.0}), Depth::finite(3)).value, 2.9751951692327133, 1e-14);
  EXPECT_NEAR(entropy(SingularSpectrum({3.0, 2.0, 1.0}), Depth::infinite()).value, 1.9416178748925277, 1e-14);
}

TEST(Entropy, OffsetIsAdditive) {
  const SingularSpectrum s({2.0, 1.0});
  const auto v = entropy(s, Depth::finite(2), 1.5);
  EXPECT_EQ(v.constant_offset, 1.5);
  EXPECT_NEAR(v.value, 0.54930614433405485 + 1.5, 1e-15);
}

TEST(Entropy, EqualSpectrumClosedForm) {
  for (int n : {2, 3, 7}) {
    const double s = 0.8;
    const double want = 0.5 * std::log(n * std::pow(s, 2.0 - 2.0 / n));
    EXPECT_NEAR(entropy(SingularSpectrum::constant(s, 2), Depth::finite(n)).value, want, 1e-14);
  }
  EXPECT_NEAR(entropy(SingularSpectrum::constant(0.8, 2), Depth::infinite()).value, std::log(0.8), 1e-15);
}

TEST(Entropy, MatchesOracleOnRandomSpectra) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 5;
    const Depth depth = kDepths[trial % 5];
    const SingularSpectrum s = random_spectrum(rng, d);
    const double want = oracle::entropy(s.as_vector(), as_oracle(depth));
    EXPECT_NEAR(entropy(s, depth).value, want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(Entropy, PermutationSymmetric) {
  Vector v(4);
  v << 0.4, 2.5, 1.1, 0.9;
  Vector sorted = v;
  std::sort(sorted.data(), sorted.data() + 4, std::greater<>());
  for (Depth depth : kDepths)
    EXPECT_NEAR(entropy_value(v, depth), entropy(SingularSpectrum(sorted), depth).value, 1e-14);
}

TEST(Entropy, ContinuousAcrossCoincidence) {
  for (Depth depth : kDepths) {
    const auto base = SingularSpectrum::constant(1.3, 2);
    const double at = entropy(base, depth).value;
    const Vector g = entropy_grad(base, depth);
    for (double gap : {2e-5, -2e-5, 1e-8, -1e-8}) {
      const auto s = SingularSpectrum::from_unordered({1.3, 1.3 * (1.0 + gap)});
      const double linear = at + g.dot(s.as_vector() - base.as_vector());
      EXPECT_NEAR(entropy(s, depth).value, linear, 1e-9) << depth.label() << " gap " << gap;
    }
  }
}

TEST(EntropyGrad, FrozenValues) {
  const Vector g = entropy_grad(SingularSpectrum({1.0, 1.0}), Depth::finite(2));
  EXPECT_NEAR(g(0), 0.25, 1e-15);
  EXPECT_NEAR(g(1), 0.25, 1e-15);
  EXPECT_EQ(entropy_grad(SingularSpectrum({2.0}), Depth::finite(2))(0), 0.0);

  const Vector g3 = entropy_grad(SingularSpectrum({3.0, 2.0, 1.0}), Depth::finite(3));
  EXPECT_NEAR(g3(0), 0.29191025383396411, 1e-15);
  EXPECT_NEAR(g3(1), 0.35325654413804027, 1e-15);
  EXPECT_NEAR(g3(2), 0.41775615022202714, 1e-15);
  const Vector gi = entropy_grad(SingularSpectrum({3.0, 2.0, 1.0}), Depth::infinite());
  EXPECT_NEAR(gi(0), 0.41224288516612182, 1e-15);
  EXPECT_NEAR(gi(1), 0.52256877203853374, 1e-15);
  EXPECT_NEAR(gi(2), 0.71813380042456707, 1e-15);
}

TEST(EntropyGrad, EqualSpectrumClosedForm) {
  for (Depth depth : kDepths) {
    for (int d : {2, 3, 6}) {
      const double s = 0.7;
      const Vector g = entropy_grad(SingularSpectrum::constant(s, d), depth);
      const double want = (d - 1) / (2.0 * s) * (1.0 - depth.inverse());
      for (int i = 0; i < d; ++i) EXPECT_NEAR(g(i), want, 1e-14);
    }
  }
}

TEST(EntropyGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 5;
    const Depth depth = kDepths[(trial / 5) % 5];
    const SingularSpectrum s = random_spectrum(rng, d);
    const auto f = [&](const Vector& x) { return oracle::entropy(x, as_oracle(depth)); };
    const Vector fd = oracle::fd_gradient(f, s.as_vector());
    EXPECT_LE(oracle::relative_error(entropy_grad(s, depth), fd), 1e-6) << depth.label() << " d=" << d;
  }
}

TEST(EntropyHessian, FrozenValues) {
  for (int n : {2, 3, 10}) {
    const double p_star = -(1.0 / 6.0) * (1.0 - 1.0 / (n * n));
    const double q_star = -(1.0 / 3.0) * (1.0 - 1.5 / n + 0.5 / (n * n));
    const Matrix h = entropy_hessian(SingularSpectrum({1.0, 1.0}), Depth::finite(n));
    EXPECT_NEAR(h(0, 0), q_star, 1e-14);
    EXPECT_NEAR(h(1, 1), q_star, 1e-14);
    EXPECT_NEAR(h(0, 1), p_star, 1e-14);
    EXPECT_NEAR(h(1, 0), p_star, 1e-14);
  }
  const Matrix h = entropy_hessian(SingularSpectrum({2.0, 1.0}), Depth::finite(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(h(i, j), -1.0 / 18.0, 1e-15);
}

TEST(EntropyHessian, MatchesFiniteDifferencesOfGradient) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 5;
    const Depth depth = kDepths[(trial / 5) % 5];
    const SingularSpectrum s = random_spectrum(rng, d);
    const auto g = [&](const Vector& x) { return entropy_grad(x, depth); };
    const Matrix fd = oracle::fd_jacobian(g, s.as_vector());
    const Matrix h = entropy_hessian(s, depth);
    EXPECT_LE((h - fd).cwiseAbs().maxCoeff(), 1e-5) << depth.label();
    EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(PairKernels, LimitsAndRankOneCase) {
  const auto k = pair_kernels(1.0, 1.0, Depth::finite(2));
  EXPECT_NEAR(k.p, -0.125, 1e-15);
  EXPECT_NEAR(k.q, -0.125, 1e-15);
  EXPECT_NEAR(k.r, 0.25, 1e-15);

  const auto k21 = pair_kernels(2.0, 1.0, Depth::finite(2));
  EXPECT_NEAR(k21.p, -1.0 / 18.0, 1e-15);
  EXPECT_NEAR(k21.q, -1.0 / 18.0, 1e-15);

  const auto near = pair_kernels(1.000001, 1.0, Depth::finite(3));
  EXPECT_NEAR(near.p, -(1.0 / 6.0) * (1.0 - 1.0 / 9.0), 1e-5);
  EXPECT_NEAR(near.q, -(1.0 / 3.0) * (1.0 - 0.5 + 1.0 / 18.0), 1e-5);

  for (Depth depth : kDepths) {
    const auto lim = pair_kernel_limits(0.9, depth);
    const auto at = pair_kernels(0.9, 0.9, depth);
    EXPECT_NEAR(lim.p, at.p, 1e-14);
    EXPECT_NEAR(lim.q, at.q, 1e-14);
    EXPECT_NEAR(lim.r, at.r, 1e-14);
  }
}

TEST(PairKernels, AgreeWithDirectFormulaAwayFromDiagonal) {
  // r(a, b) = a/(a^2-b^2) - a^{2/N-1}/(N(a^{2/N}-b^{2/N})).
  for (int n : {2, 3, 5}) {
    for (double a : {0.3, 1.7, 4.0}) {
      const double b = 1.1;
      const double k = 1.0 / n;
      const double want = a / (a * a - b * b) - std::pow(a, 2 * k - 1) * k / (std::pow(a, 2 * k) - std::pow(b, 2 * k));
      EXPECT_NEAR(pair_kernels(a, b, Depth::finite(n)).r, want, 1e-12 * std::abs(want));
    }
  }
}

TEST(PairKernels, NegativeOnRandomPairs) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const Depth depth = kDepths[trial % 5];
    const double a = log_uniform(rng, 0.01, 100.0);
    const double b = log_uniform(rng, 0.01, 100.0);
    const auto k = pair_kernels(a, b, depth);
    EXPECT_LT(k.p, 0.0);
    EXPECT_LT(k.q, 0.0);
  }
}

TEST(Entropy, RejectsNonPositiveInput) {
  Vector v(2);
  v << 1.0, -0.5;
  EXPECT_THROW(entropy_value(v, Depth::finite(2)), Error);
  EXPECT_THROW(pair_kernels(0.0, 1.0, Depth::finite(2)), Error);
}
