#pragma once

// Portable random stream used for initialization, simulation, and splits.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard's distributions are implementation-defined, so the
// transforms below are spelled out here:
//   uniform()  = (next() >> 11) * 2^-53, a double in [0, 1).
//   normal()   = Box-Muller on u1 = 1 - uniform() in (0, 1] and u2 = uniform():
//                r = sqrt(-2 ln u1), returns r cos(2 pi u2) then, on the next
//                call, r sin(2 pi u2).
//   below(n)   = rejection sampling on next() against the largest multiple of
//                n below 2^64, then modulo n.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace fastr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    std::uint64_t x = next();
    while (x > limit) x = next();
    return x % n;
  }

  /// Fisher-Yates shuffle, last position first.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fastr
