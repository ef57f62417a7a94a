#include <gtest/gtest.h>

#include <cmath>

#include "erspad/inference.hpp"
#include "support.hpp"

using namespace erspad;
using erspad::testing::reference_detector;
using erspad::testing::rel_err;

TEST(Inference, ParsesModelNames) {
  EXPECT_EQ(parse_rate_model("simple"), RateModel::simple);
  EXPECT_EQ(parse_rate_model("er"), RateModel::er);
  EXPECT_EQ(parse_rate_model("low"), RateModel::approx_low);
  EXPECT_EQ(parse_rate_model("high"), RateModel::approx_high);
  EXPECT_FALSE(parse_rate_model("exact"));
  for (auto m : {RateModel::simple, RateModel::er, RateModel::approx_low, RateModel::approx_high})
    EXPECT_EQ(parse_rate_model(to_string(m)), m);
}

TEST(Inference, SimpleModelIsStepFunctionInverse) {
  const ErParams& p = reference_detector;
  const double r = 5000.0;
  EXPECT_DOUBLE_EQ(infer_apriori_rate(r, p, 0.0, RateModel::simple).apriori_total, r / (1.0 - r * p.tau_d));
}

TEST(Inference, ErModelRoundTrip) {
  const ErParams& p = reference_detector;
  for (double r_star : {1e3, 1e6, 1e9}) {
    const double r = er_rate_forward_apriori(r_star, p);
    EXPECT_LT(rel_err(infer_apriori_rate(r, p, 0.0, RateModel::er).apriori_total, r_star), 1e-8);
  }
}

TEST(Inference, ErCorrectionIsNonNegative) {
  const ErParams& p = reference_detector;
  for (double r : {10.0, 1e3, 1e4, 12000.0, 12480.0})
    EXPECT_GE(infer_apriori_rate(r, p, 0.0, RateModel::er).apriori_total,
              infer_apriori_rate(r, p, 0.0, RateModel::simple).apriori_total);
}

TEST(Inference, SimpleUnderestimatesAtHighRecoveryLoad) {
  const ErParams& p = reference_detector;
  const double r_star = 100.0 / p.tau_r;
  const double r = er_rate_forward_apriori(r_star, p);
  const double simple = infer_apriori_rate(r, p, 0.0, RateModel::simple).apriori_total;
  EXPECT_LT(simple, r_star);
}

TEST(Inference, DarkRateIsSubtracted) {
  const ErParams& p = reference_detector;
  const double r = er_rate_forward_apriori(1e6 + 858.0, p);
  const auto out = infer_apriori_rate(r, p, 858.0, RateModel::er);
  EXPECT_NEAR(out.apriori_photon, 1e6, 1e-8 * 1e6);
  EXPECT_FALSE(out.clamped);
}

TEST(Inference, NegativePhotonRateIsClampedAndFlagged) {
  const ErParams& p = reference_detector;
  const auto out = infer_apriori_rate(500.0, p, 858.0, RateModel::simple);
  EXPECT_EQ(out.apriori_photon, 0.0);
  EXPECT_TRUE(out.clamped);
}

TEST(Inference, Saturation) {
  const ErParams& p = reference_detector;
  for (auto m : {RateModel::simple, RateModel::er, RateModel::approx_low, RateModel::approx_high})
    EXPECT_THROW(infer_apriori_rate(1.0 / p.tau_d, p, 0.0, m), SaturationError);
  EXPECT_THROW(infer_apriori_rate(0.0, p, 0.0, RateModel::er), DomainError);
  EXPECT_THROW(infer_apriori_rate(100.0, p, -1.0, RateModel::er), DomainError);
}

TEST(Inference, DarkCountRateFromMeasurement) {
  const double tau_d = 80.092e-6;
  const double measured = 858.0 / (1.0 + 858.0 * tau_d);
  EXPECT_NEAR(measured, 802.83, 0.01);
  EXPECT_NEAR(dark_count_rate_from_measurement(measured, tau_d), 858.0, 1e-9);
  EXPECT_EQ(dark_count_rate_from_measurement(0.0, tau_d), 0.0);
  EXPECT_THROW(dark_count_rate_from_measurement(1.0 / tau_d, tau_d), SaturationError);
}
