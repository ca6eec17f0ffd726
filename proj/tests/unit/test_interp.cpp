#include <gtest/gtest.h>

#include <random>

#include "papevo/interp.hpp"

using namespace papevo;

TEST(Rational, ArithmeticIsExact) {
  const Rational a(3, 4), b(-5, 6);
  EXPECT_EQ(a + b, Rational(-1, 12));
  EXPECT_EQ(a * b, Rational(-5, 8));
  EXPECT_EQ(a / b, Rational(-9, 10));
  EXPECT_EQ(Rational(6, -8), Rational(-3, 4));
  EXPECT_TRUE(b < a);
  EXPECT_THROW(Rational(1, 0), InvalidArgument);
}

TEST(Rational, FromDoubleRecoversSmallFractions) {
  EXPECT_EQ(Rational::from_double(0.1875), Rational(3, 16));
  EXPECT_EQ(Rational::from_double(9.0), Rational(9));
  EXPECT_EQ(Rational::from_double(2.0 / 7.0), Rational(2, 7));
  EXPECT_THROW(Rational::from_double(std::numbers::pi), InvalidArgument);
}

TEST(Interpolation, ExponentFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p(1.1, 20.0), th(0.01, 0.99);
  for (int i = 0; i < 100; ++i) {
    const double p0 = p(rng), p1 = p(rng), t = th(rng);
    const double pt = interpolate_exponent(p0, p1, t);
    EXPECT_NEAR(1 / pt, (1 - t) / p0 + t / p1, 1e-14);
    EXPECT_GE(pt, std::min(p0, p1) * (1 - 1e-14));
    EXPECT_LE(pt, std::max(p0, p1) * (1 + 1e-14));
  }
  EXPECT_EQ(interpolate_exponent(Rational(18), Rational(18, 7), Rational(1, 2)), Rational(9, 2));
  EXPECT_THROW(interpolate_exponent(2.0, 3.0, 1.0), InvalidArgument);
}

TEST(Interpolation, BoundCheck) {
  EXPECT_TRUE(git_bound_check(4.0, 1.0, 2.0, 0.5).ok);
  EXPECT_TRUE(git_bound_check(4.0, 1.0, 2.09, 0.5).ok);
  EXPECT_FALSE(git_bound_check(4.0, 1.0, 2.2, 0.5).ok);
}

TEST(Exponents, ApplicationSetForThreeDimensions) {
  const auto e = derive_application_exponents(3, 4, Rational(9));
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.pX, Rational(9, 8));
  EXPECT_EQ(e.pY, Rational(9, 2));
  EXPECT_EQ(e.pY1, Rational(18));
  EXPECT_EQ(e.pY2, Rational(18, 7));
  EXPECT_EQ(e.pZ1, Rational(18, 17));
  EXPECT_EQ(e.pZ2, Rational(18, 11));
  EXPECT_EQ(e.pT, Rational(9, 7));
  EXPECT_EQ(e.alpha1, Rational(5, 4));
  EXPECT_EQ(e.alpha2, Rational(3, 4));
  EXPECT_EQ(e.theta, Rational(1, 2));
  EXPECT_EQ(e.gamma, Rational(1, 6));
  EXPECT_EQ(e.theta_tilde, Rational(1, 7));
  EXPECT_EQ(e.beta1, Rational(13, 12));
  EXPECT_EQ(e.beta2, Rational(1, 2));
}

TEST(Exponents, IdentitiesHoldAcrossTheAdmissibleRange) {
  for (int d = 3; d <= 6; ++d) {
    for (int m = 2; m < 5; ++m) {
      if (m * (d - 2) <= d) continue;
      for (double r : {d * (m - 1) / 2.0 + 0.5, d * (m - 1) / 2.0 + 3.0, 40.0}) {
        const auto e = derive_application_exponents(d, m, r);
        const auto& v = e.v;
        EXPECT_NEAR((1 - v.theta) * v.alpha1 + v.theta * v.alpha2, 1.0, 1e-12);
        EXPECT_NEAR((1 - v.theta_tilde) * v.beta1 + v.theta_tilde * v.beta2, 1.0, 1e-12);
        EXPECT_NEAR(interpolate_exponent(v.pY1, v.pY2, v.theta), v.pY, 1e-12 * v.pY);
        EXPECT_GT(v.gamma, 0.0);
        EXPECT_LT(v.gamma, 1.0);
        EXPECT_LT(v.beta2, 1.0);
        EXPECT_GT(v.beta1, 1.0);
      }
    }
  }
}

TEST(Exponents, IrrationalStabilityExponent) {
  const auto e = derive_application_exponents(3, 4, 9.0 + std::numbers::sqrt2);
  EXPECT_FALSE(e.exact);
  EXPECT_NEAR(e.v.gamma, 1.0 / 3.0 - 1.5 / (9.0 + std::numbers::sqrt2), 1e-14);
}

TEST(Exponents, RejectionsNameTheInequality) {
  auto message = [](int d, int m, double r) {
    try {
      derive_application_exponents(d, m, r);
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(3, 5, 20.0).find("m < 5"), std::string::npos);
  EXPECT_NE(message(3, 3, 20.0).find("m > d/(d-2)"), std::string::npos);
  EXPECT_NE(message(3, 4, 4.0).find("r > d(m-1)/2"), std::string::npos);
  EXPECT_NE(message(2, 4, 9.0).find("d >= 3"), std::string::npos);
}

TEST(Exponents, KeyValueOutputIsStable) {
  const auto kv = derive_application_exponents(3, 4, Rational(9)).to_key_value();
  EXPECT_NE(kv.find("gamma=0.16666666666666666\n"), std::string::npos);
  EXPECT_NE(kv.find("alpha1=1.25\n"), std::string::npos);
  EXPECT_EQ(kv, derive_application_exponents(3, 4, 9.0).to_key_value());
}
