// ============================================================================
// io.hpp -- file formats.
//
//   timestamps, CSV     one time in seconds per line, shortest round-trip
//                       decimal form (bit-exact on re-read)
//   timestamps, binary  16-byte header {magic "ERTS", u32 version = 1,
//                       u64 count} then count little-endian float64
//   histogram, CSV      header "bin_left_s,count", one row per bin
//   JSON                configs, fit results, inference reports
// ============================================================================
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "erspad/errors.hpp"
#include "erspad/fit.hpp"
#include "erspad/histogram.hpp"
#include "erspad/inference.hpp"
#include "erspad/paralyzing.hpp"
#include "erspad/rng.hpp"
#include "erspad/simulator.hpp"

namespace erspad {

namespace io {

inline constexpr std::array<char, 4> timestamp_magic = {'E', 'R', 'T', 'S'};
inline constexpr std::uint32_t timestamp_version = 1;
inline constexpr std::string_view histogram_header = "bin_left_s,count";

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
  } else {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), sizeof(T))) throw IoError("truncated binary timestamp file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

inline std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  return is;
}

inline void check_written(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline void write_timestamps_csv(const std::filesystem::path& path, std::span<const double> times) {
  auto os = detail::open_out(path);
  std::string line;
  for (double t : times) {
    line = format_double(t);
    line += '\n';
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  detail::check_written(os, path);
}

inline void write_timestamps_binary(const std::filesystem::path& path,
                                    std::span<const double> times) {
  auto os = detail::open_out(path, true);
  os.write(timestamp_magic.data(), timestamp_magic.size());
  detail::put_le<std::uint32_t>(os, timestamp_version);
  detail::put_le<std::uint64_t>(os, times.size());
  for (double t : times) detail::put_le<double>(os, t);
  detail::check_written(os, path);
}

inline std::vector<double> read_timestamps_binary(const std::filesystem::path& path) {
  auto is = detail::open_in(path, true);
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != timestamp_magic)
    throw IoError("'" + path.string() + "' is not a binary timestamp file");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != timestamp_version)
    throw IoError("unsupported timestamp file version " + std::to_string(version));
  const auto count = detail::get_le<std::uint64_t>(is);
  std::vector<double> times;
  times.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) times.push_back(detail::get_le<double>(is));
  return times;
}

inline std::vector<double> read_timestamps_csv(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  std::vector<double> times;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    try {
      times.push_back(parse_double(line));
    } catch (const IoError& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return times;
}

/// Reads either timestamp format, recognised by the binary magic.
inline std::vector<double> read_timestamps(const std::filesystem::path& path) {
  {
    auto is = detail::open_in(path, true);
    std::array<char, 4> magic{};
    if (is.read(magic.data(), magic.size()) && magic == timestamp_magic)
      return read_timestamps_binary(path);
  }
  return read_timestamps_csv(path);
}

inline void write_histogram_csv(const std::filesystem::path& path, const IntervalHistogram& h) {
  auto os = detail::open_out(path);
  os << histogram_header << '\n';
  for (std::size_t k = 0; k < h.size(); ++k) os << format_double(h.left(k)) << ',' << h.counts[k] << '\n';
  detail::check_written(os, path);
}

/// Reads a histogram CSV. The bin width is recovered from the bin edges
/// unless given; a single-bin file needs it given.
inline IntervalHistogram read_histogram_csv(const std::filesystem::path& path,
                                            std::optional<double> bin_width = {}) {
  auto is = detail::open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != histogram_header)
    throw IoError("'" + path.string() + "': expected header '" + std::string(histogram_header) + "'");
  std::vector<double> lefts;
  IntervalHistogram h;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      lefts.push_back(parse_double(std::string_view(line).substr(0, comma)));
      const double c = parse_double(std::string_view(line).substr(comma + 1));
      if (c < 0.0 || c != std::floor(c)) throw IoError("count must be a non-negative integer");
      h.counts.push_back(static_cast<std::uint64_t>(c));
    } catch (const IoError& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (lefts.empty()) throw IoError("'" + path.string() + "' has no bins");
  h.origin = lefts.front();
  if (bin_width) {
    h.bin_width = *bin_width;
  } else if (lefts.size() >= 2) {
    h.bin_width = (lefts.back() - lefts.front()) / static_cast<double>(lefts.size() - 1);
  } else {
    throw IoError("single-bin histogram: the bin width must be given explicitly");
  }
  if (!(h.bin_width > 0.0)) throw IoError("bin edges must increase");
  for (std::size_t k = 0; k < lefts.size(); ++k)
    if (std::abs(lefts[k] - h.left(k)) > 1e-6 * h.bin_width)
      throw IoError("'" + path.string() + "': bins are not uniformly spaced");
  for (auto c : h.counts) h.total += c;
  return h;
}

/// bin_left_s,count,model rows for plotting a fit against its data.
inline void write_model_curve_csv(const std::filesystem::path& path, const IntervalHistogram& h,
                                  const std::vector<double>& model) {
  auto os = detail::open_out(path);
  os << "bin_left_s,count,model\n";
  for (std::size_t k = 0; k < h.size(); ++k)
    os << format_double(h.left(k)) << ',' << h.counts[k] << ',' << format_double(model[k]) << '\n';
  detail::check_written(os, path);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = detail::open_out(path);
  os << j.dump(2) << '\n';
  detail::check_written(os, path);
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace io

// nlohmann ADL hooks

inline void to_json(nlohmann::json& j, const ErParams& p) {
  j = {{"eta0", p.eta0}, {"tau_d", p.tau_d}, {"tau_r", p.tau_r}};
}

inline void to_json(nlohmann::json& j, const SourceParams& s) {
  j = {{"r_i", s.r_i}, {"dark_apriori", s.dark_apriori}};
}

inline void to_json(nlohmann::json& j, const ParalyzingParams& p) {
  j = {{"tau_p1", p.tau_p1}, {"tau_p2", p.tau_p2}};
}

inline void to_json(nlohmann::json& j, const SimConfig& c) {
  j = {{"er", c.er}, {"source", c.src}, {"seed", c.seed}, {"rng", Rng::algorithm}};
  j["paralyzing"] = c.paralyzing ? nlohmann::json(*c.paralyzing) : nlohmann::json(nullptr);
  if (const auto* n = std::get_if<EventCount>(&c.stop))
    j["stop"] = {{"events", n->count}};
  else
    j["stop"] = {{"duration", std::get<Duration>(c.stop).seconds}};
}

inline void to_json(nlohmann::json& j, const FitResult& f) {
  static constexpr std::array<const char*, 4> keys = {"r_star", "tau_d", "tau_r", "scale"};
  nlohmann::json params, sigmas, fixed = nlohmann::json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    params[keys[i]] = f.values[i];
    if (f.fixed.fixed[i]) fixed.push_back(std::string(fit_param_names[i]));
    if (f.sigma[i]) sigmas[keys[i]] = *f.sigma[i];
  }
  if (f.eta0) params["eta0"] = *f.eta0;
  if (f.sigma_eta0) sigmas["eta0"] = *f.sigma_eta0;
  j = {{"parameters", params},
       {"uncertainties", sigmas.is_null() ? nlohmann::json::object() : sigmas},
       {"fixed", fixed},
       {"goodness", {{"deviance", f.deviance}, {"dof", f.dof}, {"deviance_per_dof", f.goodness}}},
       {"iterations", f.iterations},
       {"bin_model", f.bin_model == BinModel::center ? "center" : "integral"}};
}

inline void to_json(nlohmann::json& j, const InferredRate& r) {
  j = {{"apriori_total", r.apriori_total},
       {"apriori_photon", r.apriori_photon},
       {"clamped_to_zero", r.clamped}};
}

}  // namespace erspad
