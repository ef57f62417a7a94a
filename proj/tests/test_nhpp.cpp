#include <gtest/gtest.h>

#include <cmath>

#include "erspad/er_model.hpp"
#include "erspad/nhpp.hpp"

using namespace erspad;

TEST(Nhpp, ConstantEfficiencyGivesExponentialOnTime) {
  const ConstantEfficiency eta{0.5};
  const double r = 2e6, t = 3e-7;
  EXPECT_NEAR(nhpp_ccdf(eta, r, t), std::exp(-0.5 * r * t), 1e-15);
  EXPECT_NEAR(nhpp_pdf(eta, r, t), 0.5 * r * std::exp(-0.5 * r * t), 1e-9);
  EXPECT_NEAR(mean_on_time(eta, r) * 0.5 * r, 1.0, 1e-12);
}

TEST(Nhpp, CdfAndCcdfAreComplementary) {
  const ExponentialRecovery eta{0.3, 1e-7};
  for (double t : {0.0, 1e-9, 1e-7, 1e-6})
    EXPECT_NEAR(nhpp_cdf(eta, 1e7, t) + nhpp_ccdf(eta, 1e7, t), 1.0, 1e-15);
}

TEST(Nhpp, PdfIsDerivativeOfCdf) {
  const ExponentialRecovery eta{1.0, 1e-7};
  const double r = 3e7;
  for (double t : {2e-8, 1e-7, 4e-7}) {
    const double h = 1e-4 * t;
    const double slope = (nhpp_cdf(eta, r, t + h) - nhpp_cdf(eta, r, t - h)) / (2 * h);
    EXPECT_NEAR(slope / nhpp_pdf(eta, r, t), 1.0, 1e-6) << t;
  }
}

TEST(Nhpp, ZeroRateNeverDetects) {
  const ConstantEfficiency eta{1.0};
  EXPECT_EQ(nhpp_ccdf(eta, 0.0, 1.0), 1.0);
  EXPECT_EQ(nhpp_pdf(eta, 0.0, 1.0), 0.0);
  EXPECT_THROW(mean_on_time(eta, 0.0), DivergenceError);
}

TEST(Nhpp, NegativeArgumentsAreDomainErrors) {
  const ConstantEfficiency eta{1.0};
  EXPECT_THROW(nhpp_ccdf(eta, -1.0, 1.0), DomainError);
  EXPECT_THROW(nhpp_pdf(eta, 1.0, -1.0), DomainError);
}

TEST(Nhpp, BoundedCumulativeEfficiencyHasNoFiniteMean) {
  // eta(t) = e^{-t}: the integral saturates at 1, P(no detection) > 0
  struct Fading {
    double eval(double t) const { return std::exp(-t); }
    double cumulative(double t) const { return -std::expm1(-t); }
  };
  EXPECT_THROW(mean_on_time(Fading{}, 1.0), DivergenceError);
}

TEST(Nhpp, NumericProfileMatchesClosedFormRecovery) {
  const double tau_r = 1e-7, r = 2e7;
  NumericEfficiency numeric_eta([&](double t) { return -std::expm1(-t / tau_r); });
  const ExponentialRecovery exact{1.0, tau_r};
  for (double t : {1e-9, 5e-8, 3e-7}) {
    EXPECT_NEAR(numeric_eta.cumulative(t) / exact.cumulative(t), 1.0, 1e-11) << t;
    EXPECT_NEAR(nhpp_pdf(numeric_eta, r, t) / nhpp_pdf(exact, r, t), 1.0, 1e-11) << t;
  }
}

TEST(Nhpp, SimpleRateMapsInvertEachOther) {
  const double tau_d = 80e-6;
  for (double r_star : {0.0, 1.0, 1e3, 1e6, 1e9}) {
    const double r = simple_rate_forward(r_star, tau_d);
    EXPECT_NEAR(simple_rate_inverse(r, tau_d), r_star, 1e-9 * r_star) << r_star;
  }
}

TEST(Nhpp, SimpleInverseSaturatesAtReciprocalDeadTime) {
  const double tau_d = 1e-6;
  try {
    simple_rate_inverse(1e6, tau_d);
    FAIL() << "expected saturation";
  } catch (const SaturationError& e) {
    EXPECT_DOUBLE_EQ(e.supremum(), 1e6);
  }
}

TEST(Nhpp, InvertRateGrowsBracketAndReportsSupremum) {
  auto forward = [](double x) { return x / (1.0 + x); };  // supremum 1
  EXPECT_NEAR(invert_rate(forward, 0.999, 1.0, 0.5, 1.0), 999.0, 1e-8);
  EXPECT_THROW(invert_rate(forward, 1.0, 1.0, 0.5, 1.0), SaturationError);
}
