#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace redmash {

// Counter-based random stream. Every draw is a pure function of
// (seed, trajectory, purpose, counter), so results never depend on which
// worker ran a trajectory or in what order.
class RandomStream {
 public:
  enum class Purpose : std::uint64_t { initial = 1, jumps = 2, resample = 3, test = 99 };

  RandomStream(std::uint64_t seed, std::uint64_t trajectory, Purpose purpose = Purpose::initial)
      : key_(mix(mix(seed ^ 0x243F6A8885A308D3ull) ^ mix(trajectory + 0x13198A2E03707344ull) ^
                 mix(static_cast<std::uint64_t>(purpose) * 0xA4093822299F31D0ull))) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace redmash
