// ============================================================================
// histogram.hpp -- fixed-width histograms of inter-detection intervals.
// ============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erspad/errors.hpp"

namespace erspad {

/// Bin k covers [origin + k w, origin + (k+1) w).
struct IntervalHistogram {
  double bin_width = 1e-9;
  double origin = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;      // sum of counts
  std::uint64_t underflow = 0;  // values below origin, dropped
  std::uint64_t overflow = 0;   // values at or above the upper limit, dropped

  double left(std::size_t k) const { return origin + static_cast<double>(k) * bin_width; }
  double center(std::size_t k) const { return left(k) + 0.5 * bin_width; }
  std::size_t size() const { return counts.size(); }
};

struct HistogramRange {
  double origin = 0.0;
  std::optional<double> upper;  // default: just past the largest value
};

/// Bins `values` with half-open bins; a value exactly on an edge goes to the
/// bin on its right. Empty input gives an empty histogram.
inline IntervalHistogram build_histogram(std::span<const double> values, double bin_width,
                                         HistogramRange range = {}) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width))
    throw DomainError("bin width must be positive");
  IntervalHistogram h;
  h.bin_width = bin_width;
  h.origin = range.origin;
  if (values.empty()) return h;

  std::size_t nbins = 0;
  if (range.upper) {
    if (!(*range.upper > range.origin)) throw DomainError("histogram upper limit must exceed origin");
    nbins = static_cast<std::size_t>(std::ceil((*range.upper - range.origin) / bin_width));
  } else {
    double vmax = range.origin;
    for (double v : values) vmax = std::max(vmax, v);
    nbins = static_cast<std::size_t>(std::floor((vmax - range.origin) / bin_width)) + 1;
  }
  h.counts.assign(nbins, 0);
  for (double v : values) {
    const double pos = std::floor((v - h.origin) / bin_width);
    if (pos < 0.0) {
      ++h.underflow;
    } else if (pos >= static_cast<double>(nbins) || (range.upper && v >= *range.upper)) {
      ++h.overflow;
    } else {
      ++h.counts[static_cast<std::size_t>(pos)];
      ++h.total;
    }
  }
  return h;
}

/// Sum of two histograms with identical binning (shards of one data set).
inline IntervalHistogram merge(const IntervalHistogram& a, const IntervalHistogram& b) {
  if (a.bin_width != b.bin_width || a.origin != b.origin)
    throw DomainError("cannot merge histograms with different binning");
  IntervalHistogram out = a.counts.size() >= b.counts.size() ? a : b;
  const IntervalHistogram& other = a.counts.size() >= b.counts.size() ? b : a;
  for (std::size_t k = 0; k < other.counts.size(); ++k) out.counts[k] += other.counts[k];
  out.total = a.total + b.total;
  out.underflow = a.underflow + b.underflow;
  out.overflow = a.overflow + b.overflow;
  return out;
}

}  // namespace erspad
