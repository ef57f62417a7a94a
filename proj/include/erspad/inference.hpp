// ============================================================================
// inference.hpp -- a priori rates from measured detection rates.
// ============================================================================
#pragma once

#include <optional>
#include <string_view>

#include "erspad/er_model.hpp"
#include "erspad/errors.hpp"
#include "erspad/nhpp.hpp"

namespace erspad {

enum class RateModel { simple, er, approx_low, approx_high };

inline std::optional<RateModel> parse_rate_model(std::string_view s) {
  if (s == "simple") return RateModel::simple;
  if (s == "er") return RateModel::er;
  if (s == "low" || s == "approx_low") return RateModel::approx_low;
  if (s == "high" || s == "approx_high") return RateModel::approx_high;
  return std::nullopt;
}

inline std::string_view to_string(RateModel m) {
  switch (m) {
    case RateModel::simple: return "simple";
    case RateModel::er: return "er";
    case RateModel::approx_low: return "low";
    case RateModel::approx_high: return "high";
  }
  return "?";
}

struct InferredRate {
  double apriori_total = 0.0;   // inverted R*, dark counts included
  double apriori_photon = 0.0;  // after subtracting the a priori dark rate
  bool clamped = false;         // dark subtraction went negative; reported as 0
};

/// Inverts the chosen model's rate equation at `r_measured` and removes the
/// a priori dark-count rate.
inline InferredRate infer_apriori_rate(double r_measured, const ErParams& p, double dark_apriori,
                                       RateModel model) {
  if (!(dark_apriori >= 0.0)) throw DomainError("dark-count rate must be non-negative");
  if (!(r_measured > 0.0)) throw DomainError("measured rate must be positive");
  if (r_measured * p.tau_d >= 1.0)
    throw SaturationError("measured rate at or above the saturation rate 1/tau_d", 1.0 / p.tau_d);
  InferredRate out;
  switch (model) {
    case RateModel::simple: out.apriori_total = simple_rate_inverse(r_measured, p.tau_d); break;
    case RateModel::er: out.apriori_total = er_rate_inverse(r_measured, p); break;
    case RateModel::approx_low: out.apriori_total = approx_low_inverse(r_measured, p); break;
    case RateModel::approx_high: out.apriori_total = approx_high_inverse(r_measured, p); break;
  }
  out.apriori_photon = out.apriori_total - dark_apriori;
  if (out.apriori_photon < 0.0) {
    out.apriori_photon = 0.0;
    out.clamped = true;
  }
  return out;
}

/// A priori dark-count rate from a dark measurement (step-function inverse;
/// at dark-count rates the recovery correction is negligible).
inline double dark_count_rate_from_measurement(double r_dark_measured, double tau_d) {
  return simple_rate_inverse(r_dark_measured, tau_d);
}

}  // namespace erspad
