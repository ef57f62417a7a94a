// ============================================================================
// simulator.hpp -- Monte Carlo detection timestamps for a free-running
// detector with exponential efficiency recovery.
//
// Each detector-on period is sampled by thinning: candidate avalanches arrive
// at the majorant rate R* and one arriving t after recovery start survives
// with probability eta(t)/eta0 = 1 - exp(-t/tau_r). The first survivor is
// the detection; a dead-time tau_d follows.
//
// With paralyzation enabled a survivor at t < tau_p1 is not registered: the
// detector stays blind for tau_p2 more and recovery restarts from
// eta = 0.
// ============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "erspad/er_model.hpp"
#include "erspad/errors.hpp"
#include "erspad/numeric.hpp"
#include "erspad/paralyzing.hpp"
#include "erspad/rng.hpp"

namespace erspad {

struct EventCount {
  std::uint64_t count = 0;
};

struct Duration {
  double seconds = 0.0;
};

using StopCondition = std::variant<EventCount, Duration>;

struct SimConfig {
  ErParams er;
  SourceParams src;
  std::optional<ParalyzingParams> paralyzing;
  StopCondition stop = EventCount{0};
  std::uint64_t seed = 0;

  void validate() const {
    er.validate();
    src.validate();
    if (paralyzing) paralyzing->validate();
    const bool positive = std::visit(
        [](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, EventCount>)
            return s.count > 0;
          else
            return s.seconds > 0.0;
        },
        stop);
    if (!positive) throw DomainError("stop condition must be positive");
  }
};

/// Detection times [s], strictly increasing, with the configuration that
/// produced them.
struct TimestampSeries {
  std::vector<double> times;
  SimConfig config;
};

/// Draws detector-on times (time from the end of a dead-time window to the
/// next registered detection, including any paralyzation prolongations).
class OnTimeSampler {
public:
  OnTimeSampler(const ErParams& er, double r_star, std::optional<ParalyzingParams> paralyzing = {})
      : r_star_(r_star), tau_r_(er.tau_r), paralyzing_(paralyzing) {}

  double operator()(Rng& rng) const {
    if (!paralyzing_ || paralyzing_->tau_p1 == 0.0) return avalanche_time(rng);
    double elapsed = 0.0;
    for (;;) {
      const double t = avalanche_time(rng);
      if (t >= paralyzing_->tau_p1) return elapsed + t;
      elapsed += t + paralyzing_->tau_p2;
    }
  }

private:
  double avalanche_time(Rng& rng) const {
    double t = 0.0;
    for (;;) {
      t += rng.exponential(r_star_);
      if (rng.uniform() < numeric::one_minus_exp_neg(t / tau_r_)) return t;
    }
  }

  double r_star_;
  double tau_r_;
  std::optional<ParalyzingParams> paralyzing_;
};

/// Simulates a detection record. The detector starts at the end of a
/// dead-time window at t = 0; detection k happens at
/// sum_{j<=k} on_j + (k-1) tau_d.
inline TimestampSeries simulate(const SimConfig& config) {
  config.validate();
  TimestampSeries out;
  out.config = config;
  const double r_star = config.src.apriori_rate(config.er);
  const auto* by_count = std::get_if<EventCount>(&config.stop);
  if (r_star == 0.0) {
    if (by_count) throw ProgressError("zero a priori rate: no detection will ever occur");
    return out;
  }

  Rng rng(config.seed);
  const OnTimeSampler sample(config.er, r_star, config.paralyzing);
  if (by_count) {
    out.times.reserve(by_count->count);
    double now = sample(rng);
    out.times.push_back(now);
    while (out.times.size() < by_count->count) {
      now += config.er.tau_d + sample(rng);
      out.times.push_back(now);
    }
  } else {
    const double limit = std::get<Duration>(config.stop).seconds;
    double now = sample(rng);
    while (now <= limit) {
      out.times.push_back(now);
      now += config.er.tau_d + sample(rng);
    }
  }
  return out;
}

/// Successive differences; empty for fewer than two timestamps.
inline std::vector<double> intervals(std::span<const double> times) {
  std::vector<double> out;
  if (times.size() < 2) return out;
  out.reserve(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) out.push_back(times[i] - times[i - 1]);
  return out;
}

inline std::vector<double> intervals(const TimestampSeries& series) {
  return intervals(std::span<const double>(series.times));
}

}  // namespace erspad
