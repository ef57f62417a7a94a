#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "erspad/io.hpp"

using namespace erspad;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "erspad_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<double> awkward_values() {
  return {0.0, 1e-9, 80.09205e-6 + 1.1e-7, 0.1 + 0.2, std::nextafter(1.0, 2.0), 123456.789012345678,
          std::numeric_limits<double>::denorm_min()};
}

}  // namespace

TEST(Io, CsvTimestampsRoundTripBitExactly) {
  const auto p = scratch("t.csv");
  const auto v = awkward_values();
  io::write_timestamps_csv(p, v);
  EXPECT_EQ(io::read_timestamps_csv(p), v);
  EXPECT_EQ(io::read_timestamps(p), v);
}

TEST(Io, BinaryTimestampsRoundTripAndHeader) {
  const auto p = scratch("t.bin");
  const auto v = awkward_values();
  io::write_timestamps_binary(p, v);
  EXPECT_EQ(fs::file_size(p), 16 + 8 * v.size());
  std::ifstream is(p, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "ERTS");
  EXPECT_EQ(io::read_timestamps(p), v);
}

TEST(Io, TruncatedBinaryFileIsIoError) {
  const auto p = scratch("short.bin");
  io::write_timestamps_binary(p, std::vector<double>{1.0, 2.0});
  fs::resize_file(p, 20);
  EXPECT_THROW(io::read_timestamps(p), IoError);
}

TEST(Io, MalformedCsvReportsLine) {
  const auto p = scratch("bad.csv");
  std::ofstream(p) << "1e-6\nabc\n";
  try {
    io::read_timestamps(p);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(Io, MissingFileIsIoError) {
  EXPECT_THROW(io::read_timestamps(scratch("does_not_exist.csv")), IoError);
}

TEST(Io, HistogramCsvRoundTrip) {
  IntervalHistogram h;
  h.bin_width = 1e-9;
  h.origin = 80e-6;
  h.counts = {0, 5, 17, 3, 0, 1};
  h.total = 26;
  const auto p = scratch("h.csv");
  io::write_histogram_csv(p, h);
  std::ifstream is(p);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "bin_left_s,count");
  const auto back = io::read_histogram_csv(p);
  EXPECT_EQ(back.counts, h.counts);
  EXPECT_EQ(back.total, h.total);
  EXPECT_NEAR(back.bin_width, h.bin_width, 1e-9 * h.bin_width);
  EXPECT_EQ(back.origin, h.origin);
}

TEST(Io, SingleBinHistogramNeedsExplicitWidth) {
  IntervalHistogram h;
  h.counts = {4};
  h.total = 4;
  const auto p = scratch("h1.csv");
  io::write_histogram_csv(p, h);
  EXPECT_THROW(io::read_histogram_csv(p), IoError);
  EXPECT_EQ(io::read_histogram_csv(p, 1e-9).total, 4u);
}

TEST(Io, HistogramCsvRejectsWrongHeaderAndUnevenBins) {
  const auto p = scratch("h2.csv");
  std::ofstream(p) << "left,count\n0,1\n";
  EXPECT_THROW(io::read_histogram_csv(p), IoError);
  std::ofstream(p) << "bin_left_s,count\n0,1\n1,1\n3,1\n";
  EXPECT_THROW(io::read_histogram_csv(p), IoError);
  std::ofstream(p) << "bin_left_s,count\n0,1.5\n1,1\n";
  EXPECT_THROW(io::read_histogram_csv(p), IoError);
}

TEST(Io, FitResultJsonHasUncertaintiesForFreeParametersOnly) {
  FitResult f;
  f.values = {1e7, 80e-6, 1.1e-7, 1.0};
  f.fixed.fix(FitParam::tau_d);
  f.sigma = {1e4, std::nullopt, 1e-9, 1e-3};
  f.deviance = 200.0;
  f.dof = 196.0;
  f.goodness = 200.0 / 196.0;
  f.iterations = 42;
  const nlohmann::json j = f;
  EXPECT_EQ(j["parameters"]["tau_d"], 80e-6);
  EXPECT_FALSE(j["uncertainties"].contains("tau_d"));
  EXPECT_TRUE(j["uncertainties"].contains("tau_r"));
  EXPECT_EQ(j["fixed"], nlohmann::json::array({"tau_d"}));
  EXPECT_EQ(j["iterations"], 42);
  EXPECT_EQ(j["bin_model"], "center");
}

TEST(Io, SimConfigJsonRecordsStopAndRng) {
  SimConfig c;
  c.er = {0.2, 1e-6, 1e-7};
  c.src = {1e6, 0.0};
  c.stop = EventCount{1000};
  c.seed = 7;
  const nlohmann::json j = c;
  EXPECT_EQ(j["stop"]["events"], 1000);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_TRUE(j["paralyzing"].is_null());
  EXPECT_EQ(j["rng"], std::string(Rng::algorithm));
}
