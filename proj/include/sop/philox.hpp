#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A draw is a pure function of (key, counter): trial t of a run seeded with s
// always sees the same numbers no matter which worker evaluates it.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace sop {

class Philox4x32 {
public:
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static constexpr counter_type generate(counter_type ctr, key_type key) {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr counter_type round(const counter_type& c, const key_type& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Random stream for one Monte Carlo trial. Numbers are addressed by slot, so
/// the value in slot j does not depend on how many other slots are read.
class TrialStream {
public:
  TrialStream(std::uint64_t seed, std::uint64_t trial)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trial_lo_(static_cast<std::uint32_t>(trial)),
        trial_hi_(static_cast<std::uint32_t>(trial >> 32)) {}

  Philox4x32::counter_type block(std::uint32_t slot) const {
    return Philox4x32::generate({trial_lo_, trial_hi_, slot, 0u}, key_);
  }

  /// Two independent uniforms on the open interval (0, 1).
  std::array<double, 2> uniform_pair(std::uint32_t slot) const {
    const auto b = block(slot);
    return {to_open_unit((static_cast<std::uint64_t>(b[0]) << 32) | b[1]),
            to_open_unit((static_cast<std::uint64_t>(b[2]) << 32) | b[3])};
  }

  double uniform(std::uint32_t slot) const { return uniform_pair(slot)[0]; }

  /// Circularly-symmetric complex Gaussian with E|h|^2 = variance. The squared
  /// magnitude is drawn directly as an exponential, the phase uniformly.
  std::complex<double> complex_normal(std::uint32_t slot, double variance) const {
    const auto u = uniform_pair(slot);
    const double power = -variance * std::log(u[0]);
    return std::polar(std::sqrt(power), 2.0 * std::numbers::pi * u[1]);
  }

private:
  static double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::key_type key_;
  std::uint32_t trial_lo_;
  std::uint32_t trial_hi_;
};

}  // namespace sop
