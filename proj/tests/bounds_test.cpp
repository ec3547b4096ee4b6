#include <cmath>

#include <gtest/gtest.h>

#include "khash/bounds.hpp"

using namespace khash;

namespace {

Rational q(long n, long d) { return Rational(n, d); }

}  // namespace

TEST(FkAlpha, ExactValues) {
  EXPECT_EQ(fk_alpha<Rational>(4), q(3, 8));
  EXPECT_EQ(fk_alpha<Rational>(5), q(24, 125));
  EXPECT_EQ(fk_alpha<Rational>(6), q(5, 54));
  EXPECT_DOUBLE_EQ(fk_alpha(4), 0.375);
  EXPECT_DOUBLE_EQ(fk_alpha(5), 0.192);
  EXPECT_NEAR(fk_alpha(6), 0.0925926, 1e-7);
  EXPECT_THROW((void)fk_alpha(1), std::invalid_argument);
}

TEST(SimpleBounds, TrivialAndRandomCoding) {
  EXPECT_DOUBLE_EQ(trivial_upper(2), 1.0);
  EXPECT_NEAR(trivial_upper(3), 0.585, 1e-3);
  EXPECT_NEAR(trivial_upper(4), 0.415037499279, 1e-11);
  EXPECT_DOUBLE_EQ(prob_lower(2), 1.0);
  EXPECT_NEAR(prob_lower(3), 0.181285039692, 1e-11);
  EXPECT_NEAR(prob_lower(4), 0.0473396682908, 1e-11);
  for (int k = 3; k <= 8; ++k) EXPECT_LT(prob_lower(k), fk_alpha(k));
}

TEST(GPoly, Values) {
  for (int k = 4; k <= 10; ++k) {
    EXPECT_EQ(g_poly<Rational>(k, q(1, k)), fk_alpha<Rational>(k)) << k;
    EXPECT_EQ(g_poly<Rational>(k, Rational(0)), Rational(0));
  }
  EXPECT_DOUBLE_EQ(g_poly(5, 0.2), 0.192);
  EXPECT_THROW((void)g_poly(5, 0.3), std::domain_error);
  EXPECT_THROW((void)g_poly(5, -0.1), std::domain_error);
}

TEST(GPoly, DerivativeMatchesDifferenceAndSign) {
  for (int k = 4; k <= 8; ++k) {
    for (double y : {0.05, 0.1, 1.0 / k, 0.5 / (k - 1) + 0.5 / k}) {
      const double h = 1e-7;
      const double fd = (g_poly(k, y + h) - g_poly(k, y - h)) / (2 * h);
      EXPECT_NEAR(g_poly_derivative(k, y), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
    EXPECT_GE(g_poly_derivative(k, 1.0 / k - 1e-3), 0.0);
    EXPECT_LE(g_poly_derivative(k, 1.0 / (k - 1)), 0.0);
    EXPECT_LT(g_poly_derivative(k, 0.5 / k + 0.5 / (k - 1)), 0.0);
  }
}

TEST(Xi, IdentityAndSpotValue) {
  for (int k = 4; k <= 10; ++k) {
    EXPECT_EQ(xi<Rational>(k, q(1, k)), fk_alpha<Rational>(k));
    EXPECT_EQ(eps<Rational>(k, q(1, k)), Rational(0));
  }
  EXPECT_NEAR(xi(5, 0.136163), 0.183860915394, 1e-11);
  const double g = 0.136163;
  EXPECT_NEAR(xi(5, g), 3 * std::pow(1 - g, 3) * (15 * g + 1) / 32, 1e-15);
  EXPECT_THROW((void)xi(5, 0.0), std::domain_error);
  EXPECT_THROW((void)xi(5, 0.21), std::domain_error);
}

TEST(RUnbal, Values) {
  EXPECT_DOUBLE_EQ(r_unbal(5, 0.2), 0.192);
  EXPECT_NEAR(r_unbal(5, 0.136163), 0.190825093748, 1e-11);
  EXPECT_NEAR(r_unbal(6, 1.0 / 6), 5.0 / 54, 1e-15);
  EXPECT_LT(r_unbal(5, 0.15), fk_alpha(5));
  EXPECT_THROW((void)r_unbal(3, 0.3), std::invalid_argument);
}

TEST(RUnbal, ExactOnlyAtUniform) {
  for (int k = 4; k <= 10; ++k) {
    const auto exact = r_unbal_exact(k, q(1, k));
    ASSERT_TRUE(exact.has_value());
    EXPECT_EQ(*exact, fk_alpha<Rational>(k));
    EXPECT_FALSE(r_unbal_exact(k, q(1, k + 1)).has_value());
  }
}

TEST(RBal, Values) {
  EXPECT_EQ(r_bal(5, 0.0), 0.0);
  // alpha_5 / (1 + alpha_5 / log2(5/2)).
  EXPECT_NEAR(r_bal(5, 0.192), 0.167650098492, 1e-11);
  EXPECT_LT(r_bal(5, 0.192), 0.192);
  EXPECT_NEAR(r_bal(5, theta_closed(5, 0.136163)), 0.190825508646, 1e-11);
  EXPECT_THROW((void)r_bal(3, 0.1), std::invalid_argument);
}

TEST(QPoly, Values) {
  EXPECT_NEAR(q_poly(5, 0.2, 0.2), 0.192, 1e-15);
  EXPECT_EQ(q_poly<Rational>(5, q(1, 5), q(1, 5)), fk_alpha<Rational>(5));
  EXPECT_NEAR(q_poly(5, 0.136163, 0.25), 0.221816625, 1e-12);
  EXPECT_THROW((void)q_poly(5, 0.136163, 0.26), std::domain_error);
  const double b = beta_star(5, 0.136163);
  EXPECT_NEAR(q_poly(5, 0.136163, b, BetaRange::kUnclamped), theta_closed(5, 0.136163), 1e-15);
}

TEST(BetaStar, ValuesAndPole) {
  EXPECT_NEAR(beta_star(5, 0.136163), 0.261237763143, 1e-11);
  for (int k = 4; k <= 10; ++k) {
    EXPECT_EQ(beta_star<Rational>(k, q(1, k)), q(1, k));
    EXPECT_THROW((void)beta_star(k, 1.0 / (k * k - 2 * k)), PoleError);
    EXPECT_THROW((void)theta_closed(k, 0.5 / (k * k - 2 * k)), PoleError);
  }
}

TEST(ThetaClosed, ValuesAndIdentity) {
  const double g = 0.136163;
  EXPECT_NEAR(theta_closed(5, g), 0.223019206365, 1e-11);
  EXPECT_NEAR(theta_closed(5, g), 96 * g * g * g / ((15 * g - 1) * (15 * g - 1)), 1e-15);
  for (int k = 4; k <= 10; ++k) {
    EXPECT_EQ(theta_closed<Rational>(k, q(1, k)), fk_alpha<Rational>(k));
  }
}

TEST(ThetaClamped, UsesEndpointWhenStationaryPointLeavesRange) {
  const auto c5 = theta_clamped(5, 0.136163);
  EXPECT_DOUBLE_EQ(c5.beta, 0.25);
  EXPECT_NEAR(c5.value, q_poly(5, 0.136163, 0.25), 1e-15);
  EXPECT_LT(c5.value, theta_closed(5, 0.136163));
  const auto c6 = theta_clamped(6, 0.118933327173234);
  EXPECT_NEAR(c6.value, theta_closed(6, 0.118933327173234), 1e-15);
}

TEST(KornerMarton, Values) {
  const KmBound km = km_bound(5, 4);
  ASSERT_EQ(km.terms.size(), 3u);
  EXPECT_NEAR(km.terms[0], std::log2(5.0 / 3), 1e-15);
  EXPECT_NEAR(km.terms[1], 0.8, 1e-15);
  EXPECT_NEAR(km.terms[2], 12.0 / 25 * std::log2(3.0), 1e-15);
  EXPECT_EQ(km.j, 0);
  EXPECT_NEAR(km.value, 0.736965594166, 1e-11);

  const KmBound k5 = km_bound(5, 5);
  EXPECT_EQ(k5.j, 3);
  EXPECT_DOUBLE_EQ(k5.value, 0.192);
  const KmBound k6 = km_bound(6, 6);
  EXPECT_EQ(k6.j, 4);
  ASSERT_TRUE(k6.exact.has_value());
  EXPECT_EQ(*k6.exact, q(5, 54));
}

TEST(KornerMarton, EqualsAlphaOnTheDiagonal) {
  for (int k = 4; k <= 12; ++k) {
    const KmBound km = km_bound(k, k);
    ASSERT_TRUE(km.exact.has_value()) << k;
    EXPECT_EQ(*km.exact, fk_alpha<Rational>(k)) << k;
    EXPECT_EQ(km.j, k - 2);
  }
}

TEST(Arikan, Values) {
  EXPECT_NEAR(arikan_bound(4, 4), 0.3512, 5e-4);
  EXPECT_NEAR(arikan_bound(4, 4), 0.351152266376, 1e-8);
  EXPECT_NEAR(arikan_bound(5, 4), 0.611412052497, 1e-8);
  EXPECT_NEAR(arikan_bound(5, 5), 0.235998931326, 1e-8);
  EXPECT_GT(arikan_bound(5, 5), 0.0);
  EXPECT_LE(arikan_bound(5, 5), trivial_upper(5));
  // Below alpha_k only for k = 4.
  EXPECT_LT(arikan_bound(4, 4), fk_alpha(4));
  EXPECT_GT(arikan_bound(5, 5), fk_alpha(5));
  EXPECT_GT(arikan_bound(5, 4), arikan_bound(4, 4));
  EXPECT_THROW((void)arikan_bound(3, 3), std::invalid_argument);
  EXPECT_THROW((void)arikan_bound(3, 4), std::invalid_argument);
}

TEST(Arikan, SupremumMatchesDenseScan) {
  for (auto [b, k] : {std::pair{4, 4}, {5, 4}, {5, 5}, {6, 5}, {6, 6}}) {
    const double x = arikan_bound(b, k);
    double scan = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double t = std::log2(b) * i / 200000;
      bool ok = true;
      for (int j = 2; j <= k - 2 && ok; ++j) ok = t <= arikan_alpha(b, k, j, t);
      if (ok) scan = t;
    }
    EXPECT_NEAR(x, scan, 2e-5) << b << "," << k;
  }
}
