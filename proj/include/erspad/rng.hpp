// ============================================================================
// rng.hpp -- seeded random source for the Monte Carlo simulator.
//
// std::mt19937_64 is specified bit-exactly by the standard; the conversions
// to uniform and exponential variates are spelled out here instead of using
// <random> distributions, whose algorithms differ between standard
// libraries. Same seed, same stream, on every platform.
// ============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace erspad {

class Rng {
public:
  static constexpr std::string_view algorithm = "mt19937_64; uniform = (x >> 11) * 2^-53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
  std::mt19937_64 engine_;
};

}  // namespace erspad
