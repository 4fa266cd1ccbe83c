#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mimo/numerics.hpp"

namespace mimo::numerics {
namespace {

constexpr double pi = std::numbers::pi;

TEST(LogSumReal, Examples) {
  EXPECT_NEAR(log_sum_real(0.0, 0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(log_sum_real(5.0, kNegInf), 5.0);
  EXPECT_EQ(log_sum_real(kNegInf, 5.0), 5.0);
  EXPECT_NEAR(log_sum_real(1.0, 2.0), 2.313261687518223, 1e-12);
  EXPECT_EQ(log_sum_real(kNegInf, kNegInf), kNegInf);
}

TEST(LogSumReal, NoOverflowForLargeArguments) {
  EXPECT_NEAR(log_sum_real(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(log_sum_real(-1000.0, -1001.0), -1000.0 + std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(LogSumReal, CommutativeAndAssociative) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng), c = d(rng);
    EXPECT_EQ(log_sum_real(a, b), log_sum_real(b, a));
    EXPECT_NEAR(log_sum_real(log_sum_real(a, b), c), log_sum_real(a, log_sum_real(b, c)),
                1e-12 * std::max(1.0, std::abs(a) + std::abs(b) + std::abs(c)));
  }
}

TEST(LogSumComplex, Examples) {
  const auto s = log_sum_complex({0.0, 0.0}, {0.0, pi / 2});
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(s->re, 0.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(s->im, pi / 4, 1e-12);

  const LogComplex a{1.25, -0.4};
  const auto id = log_sum_complex(a, LogComplex::zero());
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(*id, a);

  EXPECT_FALSE(log_sum_complex({0.0, 0.0}, {0.0, pi}).has_value());
}

TEST(LogSumComplex, MatchesLinearSum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(-5.0, 5.0);
  std::uniform_real_distribution<double> ph(-pi, pi);
  for (int i = 0; i < 1000; ++i) {
    const LogComplex a{mag(rng), ph(rng)};
    const LogComplex b{mag(rng), ph(rng)};
    const Complex want = exp_of(a) + exp_of(b);
    const auto got = log_sum_complex(a, b);
    if (std::abs(want) < 1e-9) continue;
    ASSERT_TRUE(got.has_value());
    EXPECT_NEAR(std::abs(exp_of(*got) - want), 0.0, 1e-12 * (std::abs(exp_of(a)) + std::abs(exp_of(b))));
    EXPECT_GT(got->im, -pi);
    EXPECT_LE(got->im, pi);
  }
}

TEST(MaxLog, Examples) {
  EXPECT_EQ(max_log_real(1.0, 2.0), 2.0);
  EXPECT_EQ(max_log_real(0.0, 0.0), 0.0);
  const LogComplex w = max_log_complex({0.0, 1.0}, {-3.0, 2.0});
  EXPECT_EQ(w, (LogComplex{0.0, 1.0}));
  // Tie keeps the first argument.
  const LogComplex t = max_log_complex({0.0, 0.5}, {0.0, -0.5});
  EXPECT_EQ(t, (LogComplex{0.0, 0.5}));
}

TEST(MaxLog, NeverExceedsJacobian) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng);
    const double j = log_sum_real(a, b);
    const double m = max_log_real(a, b);
    EXPECT_LE(m, j);
    EXPECT_LE(j - m, std::log(2.0) + 1e-15);
  }
}

TEST(WrapPhase, PrincipalBranch) {
  EXPECT_DOUBLE_EQ(wrap_phase(pi), pi);
  EXPECT_DOUBLE_EQ(wrap_phase(-pi), pi);
  EXPECT_NEAR(wrap_phase(3 * pi / 2), -pi / 2, 1e-15);
  EXPECT_EQ(principal_arg({0.0, 0.0}), 0.0);
  EXPECT_EQ(principal_arg({-1.0, -0.0}), pi);
}

TEST(RunningSums, MatchPairwiseFold) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-40.0, 40.0);
  for (int trial = 0; trial < 100; ++trial) {
    RealLogSum<SumMode::Jacobian> j;
    RealLogSum<SumMode::MaxLog> m;
    double fold = kNegInf;
    double mx = kNegInf;
    for (int i = 0; i < 32; ++i) {
      const double x = d(rng);
      j.add(x);
      m.add(x);
      fold = log_sum_real(fold, x);
      mx = max_log_real(mx, x);
    }
    EXPECT_NEAR(j.value(), fold, 1e-12 * std::max(1.0, std::abs(fold)));
    EXPECT_EQ(m.value(), mx);
  }
  EXPECT_EQ(RealLogSum<SumMode::Jacobian>{}.value(), kNegInf);
}

TEST(RunningSums, ComplexCancellationGivesZero) {
  ComplexLogSum<SumMode::Jacobian> s;
  s.add({3.0, 0.0});
  s.add({3.0, pi});
  EXPECT_TRUE(s.value().is_zero());
  EXPECT_EQ(s.ratio(0.0), Complex(0.0, 0.0));
}

TEST(RatioLogSum, MatchesLinearRatio) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a(-20.0, 20.0);
  std::normal_distribution<double> f(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    RatioLogSum<SumMode::Jacobian> s;
    Complex num{0.0, 0.0};
    double den = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double ai = a(rng);
      const Complex fi{f(rng), f(rng)};
      s.add(ai, fi, std::abs(fi), std::log(std::abs(fi)));
      num += std::exp(ai) * fi;
      den += std::exp(ai);
    }
    const Complex want = num / den;
    EXPECT_LT(std::abs(s.ratio() - want), 1e-12 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(s.denominator(), std::log(den), 1e-12 * std::abs(std::log(den)) + 1e-13);
    const Complex via_log = exp_of(s.numerator() - s.denominator());
    EXPECT_LT(std::abs(via_log - want), 1e-11 * std::max(1.0, std::abs(want)));
  }
}

TEST(RatioLogSum, MaxLogKeepsLargestTerms) {
  RatioLogSum<SumMode::MaxLog> s;
  s.add(1.0, {2.0, 0.0}, 2.0, std::log(2.0));
  s.add(1.5, {0.0, 0.1}, 0.1, std::log(0.1));
  EXPECT_EQ(s.denominator(), 1.5);
  EXPECT_NEAR(s.numerator().re, 1.0 + std::log(2.0), 1e-15);
  EXPECT_EQ(s.numerator().im, 0.0);
  EXPECT_NEAR(s.ratio().real(), std::exp(1.0 + std::log(2.0) - 1.5), 1e-15);
}

TEST(RatioLogSum, EmptyAndCancelled) {
  RatioLogSum<SumMode::Jacobian> empty;
  EXPECT_EQ(empty.denominator(), kNegInf);
  EXPECT_TRUE(empty.numerator().is_zero());
  EXPECT_EQ(empty.ratio(), Complex(0.0, 0.0));

  RatioLogSum<SumMode::Jacobian> s;
  s.add(0.0, {1.0, 0.0}, 1.0, 0.0);
  s.add(0.0, {-1.0, 0.0}, 1.0, 0.0);
  EXPECT_TRUE(s.numerator().is_zero());
  EXPECT_NEAR(s.denominator(), std::log(2.0), 1e-15);
}

TEST(Erf, Examples) {
  EXPECT_EQ(erf_approx(0.0), 0.0);
  EXPECT_NEAR(erf_approx(1.0), 0.8427007929497149, 1e-7);
  for (double t : {6.0, 8.0, 30.0}) EXPECT_NEAR(erf_approx(t), 1.0, 1e-12);
}

TEST(Erf, OddAndMonotone) {
  double prev = -1.0;
  for (double t = -7.0; t <= 7.0; t += 0.01) {
    EXPECT_EQ(erf_approx(-t), -erf_approx(t));
    EXPECT_GE(erf_approx(t), prev);
    EXPECT_NEAR(erf_approx(t), std::erf(t), 1e-7);
    prev = erf_approx(t);
  }
}

TEST(LogErf, TailsStayFinite) {
  EXPECT_EQ(log_erf_diff(1.0, 1.0), kNegInf);
  EXPECT_NEAR(log_erf_diff(-1.0, 1.0), std::log(2.0 * std::erf(1.0)), 1e-13);
  // Both bounds deep in the upper tail: the direct difference is zero.
  const double tail = log_erf_diff(30.0, 31.0);
  EXPECT_TRUE(std::isfinite(tail));
  EXPECT_NEAR(tail, log_erfc(30.0), 1e-9);
  EXPECT_NEAR(log_erf_diff(-31.0, -30.0), tail, 1e-9);
  EXPECT_NEAR(log_erfc(0.0), 0.0, 1e-15);
  EXPECT_NEAR(log_erfc(-40.0), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(log_erfc(100.0)));
}

}  // namespace
}  // namespace mimo::numerics
