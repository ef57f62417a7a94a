// ============================================================================
// erspad -- command-line front end.
//
//   erspad simulate   detection timestamps from the Monte Carlo simulator
//   erspad hist       histogram of inter-detection intervals
//   erspad fit        ER fit to an interval histogram
//   erspad infer      a priori rate from a measured detection rate
//   erspad tabulate   mean on-time and detection-rate curves versus R*
//
// Every command writes <output stem>.manifest.json next to its main output.
// Exit codes: 0 success, 2 usage or configuration, 3 numeric or fit
// failure, 4 input/output.
// ============================================================================
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "erspad/erspad.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

/// Configuration error detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ============================================================================
// --config: a JSON object mirroring the flags, or a manifest written by an
// earlier run. Its entries are spliced in front of the explicit flags, so
// the command line wins.
// ============================================================================

std::vector<std::string> config_tokens(const json& cfg) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      text = value.dump();
    } else if (value.is_number_float()) {
      text = erspad::io::format_double(value.get<double>());
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ',';
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      throw UsageError("config entry '" + key + "' has an unsupported type");
    }
    out.push_back(flag);
    out.push_back(text);
  }
  return out;
}

/// Expands --config in place. Returns the argument list without argv[0].
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;

  json doc;
  try {
    doc = erspad::io::read_json(*path);
  } catch (const erspad::IoError& e) {
    throw UsageError(std::string("cannot load config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  std::optional<std::string> command;
  if (doc.contains("command") && doc["command"].is_string()) command = doc["command"].get<std::string>();
  const json& cfg = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
  json flags = cfg;
  if (flags.contains("command")) flags.erase("command");

  auto tokens = config_tokens(flags);
  // position of the subcommand, or insert the manifest's one
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (sub == args.end()) {
    if (!command) throw UsageError("no command given on the command line or in the config");
    args.insert(args.begin(), *command);
    sub = args.begin();
  }
  args.insert(sub + 1, tokens.begin(), tokens.end());
  return args;
}

// ============================================================================
// shared helpers
// ============================================================================

fs::path resolve(const std::string& out_dir, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute() || out_dir.empty()) return p;
  return fs::path(out_dir) / p;
}

void ensure_parent(const fs::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw erspad::IoError("cannot create directory '" + p.parent_path().string() + "'");
}

fs::path manifest_path(fs::path main_output) {
  return main_output.replace_extension(".manifest.json");
}

void write_manifest(const fs::path& path, const std::string& command, const json& config,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs,
                    std::optional<std::uint64_t> seed = {}) {
  json m;
  m["command"] = command;
  m["version"] = std::string(erspad::version);
  m["config"] = config;
  m["inputs"] = json::array();
  for (const auto& p : inputs) m["inputs"].push_back(p.string());
  m["outputs"] = json::array();
  for (const auto& p : outputs) m["outputs"].push_back(p.string());
  if (seed) {
    m["seed"] = *seed;
    m["rng"] = std::string(erspad::Rng::algorithm);
  }
  erspad::io::write_json(path, m);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ============================================================================
// simulate
// ============================================================================

struct SimulateArgs {
  double eta0 = 0, tau_d = 0, tau_r = 0, r_i = 0, dark = 0;
  std::optional<double> events, duration, tau_p1, tau_p2;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out = "timestamps";
  std::string out_dir;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Simulate detection timestamps");
  sub->add_option("--eta0", a.eta0, "Asymptotic quantum efficiency")->required();
  sub->add_option("--tau-d", a.tau_d, "Dead-time [s]")->required();
  sub->add_option("--tau-r", a.tau_r, "Recovery time constant [s]")->required();
  sub->add_option("--ri", a.r_i, "Impinging photon rate [1/s]")->required();
  sub->add_option("--dark", a.dark, "A priori dark-count rate [1/s]")->capture_default_str();
  auto* ev = sub->add_option("--events", a.events, "Number of detections to record");
  auto* du = sub->add_option("--duration", a.duration, "Simulated time span [s]");
  ev->excludes(du);
  sub->add_option("--seed", a.seed, "RNG seed")->capture_default_str();
  sub->add_option("--tau-p1", a.tau_p1, "Paralyzable window after the dead-time [s]");
  sub->add_option("--tau-p2", a.tau_p2, "Dead-time extension per paralyzation [s]");
  sub->add_option("--format", a.format, "csv, bin or both")
      ->check(CLI::IsMember({"csv", "bin", "both"}))
      ->capture_default_str();
  sub->add_option("--out", a.out, "Output file stem")->capture_default_str();
  sub->add_option("--out-dir", a.out_dir, "Output directory")->envname("ERSPAD_OUTDIR");
}

int run_simulate(const SimulateArgs& a) {
  erspad::SimConfig cfg;
  cfg.er = {a.eta0, a.tau_d, a.tau_r};
  cfg.src = {a.r_i, a.dark};
  cfg.seed = a.seed;
  if (a.events) {
    const double n = *a.events;
    if (!(n >= 1.0) || n != std::floor(n) || n > 0x1.0p53)
      throw UsageError("--events must be a positive integer");
    cfg.stop = erspad::EventCount{static_cast<std::uint64_t>(n)};
  } else if (a.duration) {
    if (!(*a.duration > 0.0)) throw UsageError("--duration must be positive");
    cfg.stop = erspad::Duration{*a.duration};
  } else {
    throw UsageError("one of --events or --duration is required");
  }
  if (a.tau_p1.has_value() != a.tau_p2.has_value())
    throw UsageError("--tau-p1 and --tau-p2 must be given together");
  if (a.tau_p1) cfg.paralyzing = erspad::ParalyzingParams{*a.tau_p1, *a.tau_p2};

  const auto series = erspad::simulate(cfg);

  const fs::path stem = resolve(a.out_dir, a.out);
  ensure_parent(stem);
  std::vector<fs::path> outputs;
  if (a.format == "csv" || a.format == "both") {
    fs::path p = stem;
    p += ".csv";
    erspad::io::write_timestamps_csv(p, series.times);
    outputs.push_back(p);
  }
  if (a.format == "bin" || a.format == "both") {
    fs::path p = stem;
    p += ".bin";
    erspad::io::write_timestamps_binary(p, series.times);
    outputs.push_back(p);
  }

  json config = {{"eta0", a.eta0}, {"tau-d", a.tau_d}, {"tau-r", a.tau_r}, {"ri", a.r_i},
                 {"dark", a.dark}, {"seed", a.seed},   {"format", a.format}, {"out", a.out},
                 {"out-dir", a.out_dir}};
  if (a.events) config["events"] = static_cast<std::uint64_t>(*a.events);
  if (a.duration) config["duration"] = *a.duration;
  if (a.tau_p1) {
    config["tau-p1"] = *a.tau_p1;
    config["tau-p2"] = *a.tau_p2;
  }
  fs::path mpath = stem;
  mpath += ".manifest.json";
  write_manifest(mpath, "simulate", config, {}, outputs, a.seed);

  std::cout << "simulated " << series.times.size() << " detections";
  if (!series.times.empty()) std::cout << " over " << series.times.back() << " s";
  std::cout << "\n";
  for (const auto& p : outputs) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

// ============================================================================
// hist
// ============================================================================

struct HistArgs {
  std::string input;
  double bin_width = 1e-9;
  double origin = 0.0;
  std::optional<double> max;
  std::string out = "histogram.csv";
  std::string out_dir;
};

void add_hist(CLI::App& app, HistArgs& a) {
  auto* sub = app.add_subcommand("hist", "Histogram the intervals between detections");
  sub->add_option("--input", a.input, "Timestamp file (CSV or binary)")->required();
  sub->add_option("--bin-width", a.bin_width, "Bin width [s]")->capture_default_str();
  sub->add_option("--origin", a.origin, "Left edge of the first bin [s]")->capture_default_str();
  sub->add_option("--max", a.max, "Upper limit; longer intervals are dropped [s]");
  sub->add_option("--out", a.out, "Histogram CSV")->capture_default_str();
  sub->add_option("--out-dir", a.out_dir, "Output directory")->envname("ERSPAD_OUTDIR");
}

int run_hist(const HistArgs& a) {
  if (!(a.bin_width > 0.0)) throw UsageError("--bin-width must be positive");
  if (a.max && !(*a.max > a.origin)) throw UsageError("--max must exceed --origin");
  const auto times = erspad::io::read_timestamps(a.input);
  const auto iv = erspad::intervals(times);
  const auto h = erspad::build_histogram(iv, a.bin_width, {a.origin, a.max});

  const fs::path out = resolve(a.out_dir, a.out);
  ensure_parent(out);
  erspad::io::write_histogram_csv(out, h);
  const json config = {{"input", a.input},   {"bin-width", a.bin_width}, {"origin", a.origin},
                       {"max", optional_json(a.max)}, {"out", a.out}, {"out-dir", a.out_dir}};
  write_manifest(manifest_path(out), "hist", config, {a.input}, {out});

  std::cout << "binned " << h.total << " intervals into " << h.size() << " bins";
  if (h.underflow + h.overflow > 0)
    std::cout << " (" << h.underflow << " below origin, " << h.overflow << " above limit dropped)";
  std::cout << "\nwrote " << out.string() << "\n";
  return 0;
}

// ============================================================================
// fit
// ============================================================================

struct FitArgs {
  std::string input;
  std::optional<double> bin_width;
  std::vector<std::string> fix;
  std::optional<double> init_rstar, init_tau_d, init_tau_r, init_scale;
  std::optional<double> r_i;
  double dark = 0.0;
  bool bin_integral = false;
  int max_iter = 500;
  std::string out = "fit.json";
  std::optional<std::string> curve;
  std::string out_dir;
};

void add_fit(CLI::App& app, FitArgs& a) {
  auto* sub = app.add_subcommand("fit", "Fit the ER interval density to a histogram");
  sub->add_option("--input", a.input, "Histogram CSV")->required();
  sub->add_option("--bin-width", a.bin_width, "Bin width, if it cannot be read from the bin edges");
  sub->add_option("--fix", a.fix, "Parameters held fixed: rate, tau_d, tau_r, scale")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub->add_option("--init-rstar", a.init_rstar, "Initial a priori rate [1/s]");
  sub->add_option("--init-tau-d", a.init_tau_d, "Initial dead-time [s]");
  sub->add_option("--init-tau-r", a.init_tau_r, "Initial recovery time [s]");
  sub->add_option("--init-scale", a.init_scale, "Initial vertical scale");
  sub->add_option("--ri", a.r_i, "Calibrated photon rate [1/s]; enables eta0");
  sub->add_option("--dark", a.dark, "A priori dark-count rate [1/s]")->capture_default_str();
  sub->add_flag("--bin-integral", a.bin_integral, "Integrate the density over each bin");
  sub->add_option("--max-iter", a.max_iter, "Simplex iteration limit")->capture_default_str();
  sub->add_option("--out", a.out, "Fit result JSON")->capture_default_str();
  sub->add_option("--curve", a.curve, "Model curve CSV (default: <out stem>.curve.csv)");
  sub->add_option("--out-dir", a.out_dir, "Output directory")->envname("ERSPAD_OUTDIR");
}

int run_fit(const FitArgs& a) {
  erspad::FitMask mask;
  std::vector<std::string> fixed_names;
  for (const auto& name : a.fix) {
    if (name.empty()) continue;
    const auto p = erspad::parse_fit_param(name);
    if (!p) throw UsageError("unknown fit parameter '" + name + "'");
    mask.fix(*p);
    fixed_names.push_back(std::string(erspad::fit_param_names[static_cast<std::size_t>(*p)]));
  }
  if (a.max_iter < 1) throw UsageError("--max-iter must be positive");
  const auto h = erspad::io::read_histogram_csv(a.input, a.bin_width);

  erspad::FitInit init{a.init_rstar, a.init_tau_d, a.init_tau_r, a.init_scale};
  erspad::FitOptions opt;
  opt.bin_model = a.bin_integral ? erspad::BinModel::integral : erspad::BinModel::center;
  opt.r_i = a.r_i;
  opt.dark_apriori = a.dark;
  opt.max_iter = a.max_iter;
  const auto result = erspad::fit_er_histogram(h, init, mask, opt);

  const fs::path out = resolve(a.out_dir, a.out);
  fs::path curve = a.curve ? resolve(a.out_dir, *a.curve) : out;
  if (!a.curve) curve.replace_extension(".curve.csv");
  ensure_parent(out);
  ensure_parent(curve);
  erspad::io::write_json(out, json(result));
  erspad::io::write_model_curve_csv(curve, h, erspad::expected_counts(h, result.values, result.bin_model));

  const json config = {{"input", a.input},
                       {"bin-width", optional_json(a.bin_width)},
                       {"fix", fixed_names},
                       {"init-rstar", optional_json(a.init_rstar)},
                       {"init-tau-d", optional_json(a.init_tau_d)},
                       {"init-tau-r", optional_json(a.init_tau_r)},
                       {"init-scale", optional_json(a.init_scale)},
                       {"ri", optional_json(a.r_i)},
                       {"dark", a.dark},
                       {"bin-integral", a.bin_integral},
                       {"max-iter", a.max_iter},
                       {"out", a.out},
                       {"curve", a.curve ? json(*a.curve) : json(nullptr)},
                       {"out-dir", a.out_dir}};
  write_manifest(manifest_path(out), "fit", config, {a.input}, {out, curve});

  static constexpr std::array<const char*, 4> labels = {"R*    ", "tau_d ", "tau_r ", "scale "};
  for (std::size_t i = 0; i < 4; ++i) {
    std::cout << labels[i] << " = " << result.values[i];
    if (result.sigma[i])
      std::cout << " +/- " << *result.sigma[i];
    else
      std::cout << " (fixed)";
    std::cout << "\n";
  }
  if (result.eta0) std::cout << "eta0   = " << *result.eta0 << " +/- " << result.sigma_eta0.value_or(0.0) << "\n";
  std::cout << "deviance/dof = " << result.goodness << " (dof " << result.dof << "), "
            << result.iterations << " iterations\nwrote " << out.string() << ", " << curve.string()
            << "\n";
  return 0;
}

// ============================================================================
// infer
// ============================================================================

struct InferArgs {
  double rate = 0.0;
  std::string model = "er";
  std::optional<double> dark, dark_measured;
  std::optional<double> eta0;
  double tau_d = 0.0;
  std::optional<double> tau_r;
  std::string out = "infer.json";
  std::string out_dir;
};

void add_infer(CLI::App& app, InferArgs& a) {
  auto* sub = app.add_subcommand("infer", "A priori rate from a measured detection rate");
  sub->add_option("--rate", a.rate, "Measured detection rate [1/s]")->required();
  sub->add_option("--model", a.model, "simple, er, low or high")
      ->check(CLI::IsMember({"simple", "er", "low", "high"}))
      ->capture_default_str();
  auto* d = sub->add_option("--dark", a.dark, "A priori dark-count rate [1/s]");
  auto* dm = sub->add_option("--dark-measured", a.dark_measured, "Measured dark-count rate [1/s]");
  d->excludes(dm);
  sub->add_option("--eta0", a.eta0, "Quantum efficiency; adds the impinging photon rate");
  sub->add_option("--tau-d", a.tau_d, "Dead-time [s]")->required();
  sub->add_option("--tau-r", a.tau_r, "Recovery time constant [s]");
  sub->add_option("--out", a.out, "Report JSON")->capture_default_str();
  sub->add_option("--out-dir", a.out_dir, "Output directory")->envname("ERSPAD_OUTDIR");
}

int run_infer(const InferArgs& a) {
  const auto model = *erspad::parse_rate_model(a.model);
  if (model != erspad::RateModel::simple && !a.tau_r)
    throw UsageError("--tau-r is required for model '" + a.model + "'");
  if (a.eta0 && !(*a.eta0 > 0.0 && *a.eta0 <= 1.0)) throw UsageError("--eta0 must lie in (0, 1]");
  const erspad::ErParams p{a.eta0.value_or(1.0), a.tau_d, a.tau_r.value_or(1.0)};
  p.validate();
  double dark = a.dark.value_or(0.0);
  if (a.dark_measured) dark = erspad::dark_count_rate_from_measurement(*a.dark_measured, a.tau_d);
  const auto r = erspad::infer_apriori_rate(a.rate, p, dark, model);

  json report = r;
  report["model"] = a.model;
  report["measured_rate"] = a.rate;
  report["dark_apriori"] = dark;
  if (a.eta0) report["photon_rate"] = r.apriori_photon / *a.eta0;

  const fs::path out = resolve(a.out_dir, a.out);
  ensure_parent(out);
  erspad::io::write_json(out, report);
  const json config = {{"rate", a.rate},
                       {"model", a.model},
                       {"dark", a.dark_measured ? json(nullptr) : json(dark)},
                       {"dark-measured", optional_json(a.dark_measured)},
                       {"eta0", optional_json(a.eta0)},
                       {"tau-d", a.tau_d},
                       {"tau-r", optional_json(a.tau_r)},
                       {"out", a.out},
                       {"out-dir", a.out_dir}};
  write_manifest(manifest_path(out), "infer", config, {}, {out});

  std::cout << "model " << a.model << ": measured " << a.rate << " /s\n"
            << "  a priori rate (with dark counts) " << r.apriori_total << " /s\n"
            << "  a priori dark-count rate         " << dark << " /s\n"
            << "  a priori photon rate             " << r.apriori_photon << " /s\n";
  if (a.eta0) std::cout << "  impinging photon rate            " << r.apriori_photon / *a.eta0 << " /s\n";
  if (r.clamped) std::cout << "warning: dark-count subtraction went negative; photon rate set to 0\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// ============================================================================
// tabulate
// ============================================================================

struct TabulateArgs {
  std::string sweep = "rstar";
  double from = 0.0, to = 0.0;
  int points = 100;
  std::vector<std::string> models{"er"};
  double tau_d = 0.0, tau_r = 0.0;
  std::optional<double> tau_p1, tau_p2;
  std::string out = "tabulate.csv";
  std::string out_dir;
};

void add_tabulate(CLI::App& app, TabulateArgs& a) {
  auto* sub = app.add_subcommand("tabulate", "Tabulate mean on-time and detection rate versus R*");
  sub->add_option("--sweep", a.sweep, "Swept quantity")->check(CLI::IsMember({"rstar"}))->capture_default_str();
  sub->add_option("--from", a.from, "First a priori rate [1/s]")->required();
  sub->add_option("--to", a.to, "Last a priori rate [1/s]")->required();
  sub->add_option("--points", a.points, "Log-spaced points")->capture_default_str();
  sub->add_option("--model", a.models, "Any of er, simple, low, high, paralyzing")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->check(CLI::IsMember({"er", "simple", "low", "high", "paralyzing"}));
  sub->add_option("--tau-d", a.tau_d, "Dead-time [s]")->required();
  sub->add_option("--tau-r", a.tau_r, "Recovery time constant [s]")->required();
  sub->add_option("--tau-p1", a.tau_p1, "Paralyzable window [s]");
  sub->add_option("--tau-p2", a.tau_p2, "Dead-time extension per paralyzation [s]");
  sub->add_option("--out", a.out, "Output CSV")->capture_default_str();
  sub->add_option("--out-dir", a.out_dir, "Output directory")->envname("ERSPAD_OUTDIR");
}

int run_tabulate(const TabulateArgs& a) {
  if (!(a.from > 0.0) || !(a.to > 0.0)) throw UsageError("--from and --to must be positive");
  if (a.points < 1) throw UsageError("--points must be at least 1");
  if (a.points > 1 && a.from == a.to) throw UsageError("--from equals --to; use --points 1");
  const bool para = std::find(a.models.begin(), a.models.end(), "paralyzing") != a.models.end();
  if (para && !(a.tau_p1 && a.tau_p2))
    throw UsageError("the paralyzing model needs --tau-p1 and --tau-p2");
  const erspad::ErParams p{1.0, a.tau_d, a.tau_r};
  p.validate();
  const erspad::ParalyzingParams pp{a.tau_p1.value_or(0.0), a.tau_p2.value_or(0.0)};
  if (para) pp.validate();

  const fs::path out = resolve(a.out_dir, a.out);
  ensure_parent(out);
  std::ofstream os(out);
  if (!os) throw erspad::IoError("cannot open '" + out.string() + "' for writing");
  os << "r_star";
  for (const auto& m : a.models) os << ",mean_on_" << m << ",rate_" << m;
  os << "\n";

  using erspad::io::format_double;
  const double l0 = std::log(a.from), l1 = std::log(a.to);
  for (int i = 0; i < a.points; ++i) {
    double r_star = a.from;
    if (i == a.points - 1 && i > 0) r_star = a.to;
    else if (i > 0) r_star = std::exp(l0 + (l1 - l0) * i / (a.points - 1));
    os << format_double(r_star);
    for (const auto& m : a.models) {
      double mean = 0.0;
      if (m == "er") mean = erspad::er_mean_on_time(r_star, a.tau_r);
      else if (m == "simple") mean = 1.0 / r_star;
      else if (m == "low") mean = erspad::approx_low_mean(r_star, a.tau_r);
      else if (m == "high") mean = erspad::approx_high_mean(r_star, a.tau_r);
      else mean = erspad::paralyzing_mean_on_time(pp, p, r_star);
      os << ',' << format_double(mean) << ',' << format_double(erspad::rate_forward(mean, a.tau_d));
    }
    os << "\n";
  }
  os.flush();
  if (!os) throw erspad::IoError("write to '" + out.string() + "' failed");

  const json config = {{"sweep", a.sweep},      {"from", a.from},
                       {"to", a.to},            {"points", a.points},
                       {"model", a.models},     {"tau-d", a.tau_d},
                       {"tau-r", a.tau_r},      {"tau-p1", optional_json(a.tau_p1)},
                       {"tau-p2", optional_json(a.tau_p2)}, {"out", a.out},
                       {"out-dir", a.out_dir}};
  write_manifest(manifest_path(out), "tabulate", config, {}, {out});
  std::cout << "wrote " << a.points << " rows to " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-recovery SPAD count-rate toolkit"};
  app.set_version_flag("--version", std::string(erspad::version));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "JSON config or manifest; its entries act as flags");

  SimulateArgs sim;
  HistArgs hist;
  FitArgs fit;
  InferArgs infer;
  TabulateArgs tab;
  add_simulate(app, sim);
  add_hist(app, hist);
  add_fit(app, fit);
  add_infer(app, infer);
  add_tabulate(app, tab);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (app.got_subcommand("simulate")) return run_simulate(sim);
    if (app.got_subcommand("hist")) return run_hist(hist);
    if (app.got_subcommand("fit")) return run_fit(fit);
    if (app.got_subcommand("infer")) return run_infer(infer);
    if (app.got_subcommand("tabulate")) return run_tabulate(tab);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const erspad::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const erspad::SaturationError& e) {
    std::cerr << "error: " << e.what() << " (supremum " << e.supremum() << " /s)\n";
    return exit_usage;
  } catch (const erspad::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const erspad::FitError& e) {
    std::cerr << "error: " << e.what() << "\n" << e.trace();
    return exit_numeric;
  } catch (const erspad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  }
  return exit_usage;
}
