#include <gtest/gtest.h>

#include <cmath>

#include "fqlin/analytic.hpp"
#include "fqlin/bethe.hpp"

using namespace fqlin;
namespace A = fqlin::analytic;

// Reference values below were computed independently with 40-digit
// arithmetic (grid scan plus root polishing).
namespace ref {
constexpr double d3_star = 2.455407482284128;
constexpr double mu3_star = 1.2564312086;
constexpr double d4_star = 3.0891193592100337;
constexpr double d5_star = 3.5089013324;
constexpr double d10_star = 4.6119737111;
constexpr double rho_3_27 = 0.8711270718931971;
constexpr double d3 = 2.753805829974258;
constexpr double d4 = 3.9070806595121845;
}  // namespace ref

TEST(Rho, BelowDynamicalThresholdIsZero) {
  EXPECT_EQ(A::rho(3, 1.0), 0.0);
  EXPECT_EQ(A::rho(3, 2.4), 0.0);
  EXPECT_EQ(A::rho(4, 2.0), 0.0);
}

TEST(Rho, ReferenceValueAndResidual) {
  const double r = A::rho(3, 2.7);
  EXPECT_NEAR(r, ref::rho_3_27, 1e-10);
  // independent check: bisection on f(x) - x over [0.5, 1]
  double lo = 0.5, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (A::fixed_point_map(3, 2.7, mid) - mid > 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(r, lo, 1e-10);
  for (unsigned k : {3U, 4U, 5U, 7U})
    for (double d = A::d_k_star(k) + 1e-3; d < 12; d += 0.37) {
      const double rr = A::rho(k, d);
      ASSERT_GT(rr, 0.0);
      ASSERT_LT(std::abs(rr - A::fixed_point_map(k, d, rr)), 1e-10) << k << " " << d;
    }
}

TEST(Rho, TendsToOne) {
  EXPECT_NEAR(A::rho(3, 40.0), 1.0, 1e-12);
  EXPECT_NEAR(A::rho(5, 25.0), 1.0 - std::exp(-25.0), 1e-9);
}

TEST(DkStar, ReferenceValues) {
  EXPECT_NEAR(A::d_k_star(3), ref::d3_star, 1e-9);
  EXPECT_NEAR(A::mu_star(3), ref::mu3_star, 1e-6);
  EXPECT_NEAR(A::d_k_star(4), ref::d4_star, 1e-9);
  EXPECT_NEAR(A::d_k_star(5), ref::d5_star, 1e-9);
  EXPECT_NEAR(A::d_k_star(10), ref::d10_star, 1e-9);
}

TEST(DkStar, TwoMethodsAgreeAndBracketRhoOnset) {
  for (unsigned k : {3U, 4U, 10U}) {
    const double a = A::d_k_star(k), b = A::d_k_star_by_bisection(k);
    EXPECT_NEAR(a, b, 1e-6) << k;
    EXPECT_EQ(A::rho(k, a * 0.99), 0.0);
    EXPECT_GT(A::rho(k, a * 1.01), 0.0);
  }
}

TEST(Dk, ReferenceValuesAndBracketing) {
  const double d3 = A::d_k(3);
  EXPECT_NEAR(d3, ref::d3, 1e-8);
  EXPECT_GE(d3, 2.74);
  EXPECT_LE(d3, 2.76);
  EXPECT_GT(A::threshold_expression(3, d3 - 1e-3), 0.0);
  EXPECT_LT(A::threshold_expression(3, d3 + 1e-3), 0.0);
  const double d4 = A::d_k(4);
  EXPECT_NEAR(d4, ref::d4, 1e-8);
  EXPECT_GT(d4 / 4, 0.9);
  EXPECT_LT(d4 / 4, 1.0);
  for (unsigned k : {3U, 4U, 5U, 6U}) {
    EXPECT_LT(A::d_k_star(k), A::d_k(k));
    EXPECT_NEAR(A::pi_k(k, A::d_k(k)), 1.0, 1e-6) << k;
  }
}

TEST(PiK, StrictlyIncreasing) {
  for (unsigned k : {3U, 4U}) {
    const double s = A::d_k_star(k);
    double prev = A::pi_k(k, s + 1e-4);
    for (double d = s + 0.05; d <= s + 5; d += 0.05) {
      const double p = A::pi_k(k, d);
      ASSERT_GT(p, prev) << d;
      prev = p;
    }
  }
  EXPECT_THROW(A::pi_k(3, 1.0), OutOfRegime);
}

TEST(CoreFractions, ReferenceValues) {
  struct Case {
    double d, ns, ms;
  };
  for (auto [d, ns, ms] : {Case{2.0, 0, 0}, Case{2.6, 0.54869897270, 0.51558984042}, Case{3.0, 0.72274005768, 0.78349917229},
                           Case{3.5, 0.83242336779, 1.03337163240}}) {
    const auto [a, b] = A::core_fractions(3, d);
    EXPECT_NEAR(a, ns, 1e-9) << d;
    EXPECT_NEAR(b, ms, 1e-9) << d;
  }
}

TEST(Phi, AtZeroAndDichotomy) {
  for (double d : {1.0, 2.0, 2.7, 3.3})
    EXPECT_DOUBLE_EQ(A::phi(3, d, 0.0), 1.0 - d / 3.0);
  const double dk = A::d_k(3);
  for (double d = 2.0; d < dk - 0.01; d += 0.1) {
    const auto m = A::phi_max(3, d);
    EXPECT_EQ(m.argmax, 0.0) << d;
    EXPECT_DOUBLE_EQ(m.value, 1.0 - d / 3.0);
  }
  for (double d = dk + 0.01; d < 5; d += 0.1) {
    const auto m = A::phi_max(3, d);
    const double r = A::rho(3, d);
    EXPECT_DOUBLE_EQ(m.argmax, r) << d;
    EXPECT_NEAR(m.value, 1 - d / 3 - r + d * r * r - d * 2.0 * r * r * r / 3.0, 1e-12);
  }
}

TEST(Phi, UnstableFixedPointLiesBelowRho) {
  const auto u = A::unstable_fixed_point(3, 2.7);
  ASSERT_TRUE(u);
  EXPECT_GT(*u, 0.0);
  EXPECT_LT(*u, A::rho(3, 2.7));
  EXPECT_NEAR(A::fixed_point_map(3, 2.7, *u), *u, 1e-10);
  EXPECT_FALSE(A::unstable_fixed_point(3, 2.0));
}

TEST(RankFraction, ReferenceValuesAndDomain) {
  EXPECT_NEAR(A::rank_fraction(3, 3.5), 0.8277586303314, 1e-9);
  EXPECT_NEAR(A::rank_fraction(3, 2.9), 0.9636165476834, 1e-9);
  EXPECT_THROW(A::rank_fraction(3, 2.7), BelowThreshold);
  for (double d = 2.8; d < 30; d += 0.7) EXPECT_LE(A::rank_fraction(3, d) * d / 3, 1.0 + 1e-12);
}

TEST(ClusterExponent, ReferenceValueAndDomain) {
  EXPECT_NEAR(A::cluster_exponent(3, 2.6), 0.033109132278, 1e-9);
  EXPECT_GT(A::cluster_exponent(3, A::d_k_star(3) + 1e-3), 0.0);
  EXPECT_NEAR(A::cluster_exponent(3, A::d_k(3) - 1e-7), 0.0, 1e-5);
  EXPECT_THROW(A::cluster_exponent(3, 2.0), OutOfRegime);
  EXPECT_THROW(A::cluster_exponent(3, 3.0), OutOfRegime);
}

TEST(SecondMoment, PeakAboveHalfAndLowDensity) {
  const auto c = A::second_moment_curve(3, 2.7, 2001);
  EXPECT_NEAR(c.argmax, 0.91375, 1e-3);
  EXPECT_NEAR(c.max, 0.1432944625, 1e-8);
  EXPECT_GT(c.max, A::second_moment_exponent(3, 2.7, 0.5));
  EXPECT_NEAR(A::second_moment_exponent(3, 2.7, 0.5), 0.1386294361, 1e-9);
  const auto low = A::second_moment_curve(3, 2.0, 2001);
  EXPECT_EQ(low.argmax, 0.5);
  EXPECT_NEAR(low.max, 0.462098120373, 1e-10);
  // F(1/2) = (2 - 2d/k) ln 2
  for (double d : {1.0, 2.5}) EXPECT_NEAR(A::second_moment_exponent(3, d, 0.5), (2 - 2 * d / 3) * std::log(2.0), 1e-14);
}

TEST(ThresholdReport, Fields) {
  const auto r = A::threshold_report(3, 2.6);
  EXPECT_NEAR(r.d_k, ref::d3, 1e-8);
  ASSERT_TRUE(r.at);
  EXPECT_TRUE(r.at->cluster_exponent);
  EXPECT_FALSE(r.at->rank_frac);
  EXPECT_THROW(A::threshold_report(2), InvalidArgument);
}

TEST(Bethe, ClosedFormIdentities) {
  for (unsigned q : {2U, 3U, 5U})
    for (double d : {0.5, 2.0, 3.7}) {
      EXPECT_NEAR(bethe_closed_form(3, d, 1.0, q), std::exp(-d) * std::log(q), 1e-14);
      EXPECT_NEAR(bethe_closed_form(4, d, 0.0, q), (1 - d / 4) * std::log(q), 1e-14);
    }
}

TEST(Bethe, DegenerateMessages) {
  const auto P = RowDistribution::uniform_nonzero();
  const auto zero = bethe_mc(3, 2.0, 0.0, 3, P, 5000, 1);
  EXPECT_NEAR(zero.b_prime, -std::log(3.0), 1e-12);
  const auto one = bethe_mc(3, 2.0, 1.0, 3, P, 5000, 1);
  EXPECT_EQ(one.b_prime, 0.0);
}

TEST(Bethe, MonteCarloMatchesClosedForm) {
  const auto r = bethe_mc(3, 2.0, 0.5, 3, RowDistribution::uniform_nonzero(), 100000, 7);
  EXPECT_LE(std::abs(r.estimate - bethe_closed_form(3, 2.0, 0.5, 3)), 3 * r.stderr_);
}

TEST(Bethe, ThreadCountDoesNotChangeTheEstimate) {
  const auto P = RowDistribution::uniform_nonzero();
  const auto a = bethe_mc(4, 2.5, 0.3, 2, P, 20000, 11, 1), b = bethe_mc(4, 2.5, 0.3, 2, P, 20000, 11, 3);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(PhiCapital, UniformOverlap) {
  for (unsigned q : {2U, 3U, 4U})
    for (unsigned k : {3U, 4U}) EXPECT_NEAR(phi_capital(q, k, RowDistribution::uniform_nonzero(), uniform_overlap(q)), -2 * std::log(q), 1e-12);
  EXPECT_THROW(phi_capital(9, 8, RowDistribution::uniform_nonzero(), uniform_overlap(9)), ComplexityGuard);
  EXPECT_THROW(phi_capital(3, 3, RowDistribution::uniform_nonzero(), uniform_overlap(2)), LengthMismatch);
}
