#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "erspad/simulator.hpp"
#include "support.hpp"

using namespace erspad;
using erspad::testing::reference_detector;

namespace {

SimConfig config_for(double a, std::uint64_t events, std::uint64_t seed) {
  SimConfig c;
  c.er = {1.0, 1e-6, 1e-7};
  c.src = {a / c.er.tau_r, 0.0};
  c.stop = EventCount{events};
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Rng, UniformStreamIsReproducibleAndInRange) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, FirstValueIsPinned) {
  // mt19937_64 with seed 5489 yields 14514284786278117030 first
  Rng r(5489);
  EXPECT_EQ(r.uniform(), static_cast<double>(14514284786278117030ull >> 11) * 0x1.0p-53);
}

TEST(Simulator, SameSeedSameTimestamps) {
  const auto c = config_for(1.0, 10000, 3);
  EXPECT_EQ(simulate(c).times, simulate(c).times);
  auto d = c;
  d.seed = 4;
  EXPECT_NE(simulate(c).times, simulate(d).times);
}

TEST(Simulator, IntervalsNeverShorterThanDeadTime) {
  const auto s = simulate(config_for(10.0, 20000, 1));
  ASSERT_EQ(s.times.size(), 20000u);
  for (double dt : intervals(s)) EXPECT_GT(dt, 1e-6);
}

TEST(Simulator, TimestampsStrictlyIncrease) {
  const auto s = simulate(config_for(0.5, 5000, 2));
  for (std::size_t i = 1; i < s.times.size(); ++i) EXPECT_GT(s.times[i], s.times[i - 1]);
}

TEST(Simulator, DurationStopKeepsEventsInsideSpan) {
  auto c = config_for(1.0, 0, 5);
  c.stop = Duration{0.01};
  const auto s = simulate(c);
  ASSERT_FALSE(s.times.empty());
  EXPECT_LE(s.times.back(), 0.01);
  // expected count ~ span / (tau_d + <t>)
  const double expected = 0.01 / (1e-6 + er_mean_on_time(1e7, 1e-7));
  EXPECT_NEAR(static_cast<double>(s.times.size()), expected, 5.0 * std::sqrt(expected));
}

TEST(Simulator, ZeroRateWithEventStopCannotProgress) {
  auto c = config_for(1.0, 10, 0);
  c.src.r_i = 0.0;
  EXPECT_THROW(simulate(c), ProgressError);
  c.stop = Duration{1.0};
  EXPECT_TRUE(simulate(c).times.empty());
}

TEST(Simulator, RejectsInvalidConfig) {
  auto c = config_for(1.0, 0, 0);
  EXPECT_THROW(simulate(c), DomainError);
  c.stop = EventCount{10};
  c.er.tau_r = -1.0;
  EXPECT_THROW(simulate(c), DomainError);
}

TEST(Simulator, OnTimeMeanMatchesModelAtUnitRateTimesRecovery) {
  // 1e7 on-times, compared with the incomplete-gamma mean
  const ErParams p{1.0, 1e-6, 1e-7};
  const double r = 1e7;
  OnTimeSampler sample(p, r);
  Rng rng(2024);
  const int n = 10'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = sample(rng);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - erspad::testing::gamma_mean_on_time(r, 1e-7)), 4.0 * se);
}

TEST(Simulator, OnTimeDistributionMatchesCdf) {
  // Kolmogorov-Smirnov against the exact cdf
  const double r = 3e7, tau_r = 1e-7;
  OnTimeSampler sample({1.0, 1e-6, tau_r}, r);
  Rng rng(9);
  std::vector<double> t(100000);
  for (auto& x : t) x = sample(rng);
  std::sort(t.begin(), t.end());
  double d = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double f = er_cdf(t[i], r, tau_r);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  // 1.95 / sqrt(n) is the 0.1% critical value
  EXPECT_LT(d, 1.95 / std::sqrt(n));
}

TEST(Simulator, ParalyzingSamplerMatchesRenewalMean) {
  // each paralysis restarts recovery, so the on-time is a renewal sum with
  // mean (E[T] + p tau_p2) / (1 - p), p = P(T < tau_p1)
  const ErParams p{1.0, 1e-6, 1e-7};
  const ParalyzingParams pp{15e-9, 27e-9};
  const double r = 1e9;
  OnTimeSampler sample(p, r, pp);
  Rng rng(77);
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = sample(rng);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const double prob = er_cdf(pp.tau_p1, r, p.tau_r);
  const double et = er_mean_on_time(r, p.tau_r);
  const double expected = (et + prob * pp.tau_p2) / (1.0 - prob);
  EXPECT_LT(std::abs(mean - expected), 4.0 * se);
}

TEST(Simulator, IntervalsOfShortSeries) {
  EXPECT_TRUE(intervals(std::vector<double>{}).empty());
  EXPECT_TRUE(intervals(std::vector<double>{1.0}).empty());
  EXPECT_EQ(intervals(std::vector<double>{1.0, 3.0, 6.0}), (std::vector<double>{2.0, 3.0}));
}

TEST(Simulator, ParalyzingLowersDetectionRate) {
  SimConfig c;
  c.er = reference_detector;
  c.src = {1e9 / c.er.eta0, 0.0};
  c.stop = EventCount{20000};
  c.seed = 8;
  const auto plain = simulate(c);
  c.paralyzing = ParalyzingParams{15e-9, 27e-9};
  const auto para = simulate(c);
  const auto rate = [](const TimestampSeries& s) {
    return static_cast<double>(s.times.size() - 1) / (s.times.back() - s.times.front());
  };
  EXPECT_LT(rate(para), rate(plain));
}
