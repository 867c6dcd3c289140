#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace kout {

// All randomness in the library flows through this engine. The generator and
// every distribution on top of it are implemented here, in integer arithmetic
// plus IEEE doubles, so that a given (seed, stream) pair produces the same
// draws on every platform. Standard-library distributions are avoided on
// purpose: their algorithms are implementation-defined.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// A master seed plus a stream index. Streams are cheap to derive, so each
// replicate of a Monte Carlo batch owns one; results then do not depend on
// how replicates are scheduled across threads.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// xoshiro256++ seeded through splitmix64 from (seed, stream).
class Rng {
 public:
  explicit Rng(RngSeed s) {
    std::uint64_t a = s.seed;
    std::uint64_t h1 = splitmix64(a);
    std::uint64_t b = s.stream ^ 0xD1B54A32D192ED03ull;
    std::uint64_t h2 = splitmix64(b);
    std::uint64_t x = h1 ^ (h2 + 0x9E3779B97F4A7C15ull + (h1 << 6) + (h1 >> 2));
    for (auto& w : state_) w = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next_u64() {
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased integer in [0, bound). Lemire multiply-shift with rejection.
  std::uint32_t below(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(next_half()) * bound;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < bound) {
      std::uint32_t threshold = (0u - bound) % bound;
      while (lo < threshold) {
        m = static_cast<std::uint64_t>(next_half()) * bound;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second coordinate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = u01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586 * u01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1). Marsaglia-Tsang for shape >= 1, boosting for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = u01();
      if (u <= 0.0) u = 0x1.0p-53;
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Poisson(mean). Knuth inversion, split into chunks so the product of
  // uniforms never underflows.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint32_t next_half() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    double p = 1.0;
    std::uint64_t count = 0;
    do {
      p *= u01();
      ++count;
    } while (p > limit);
    return count - 1;
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kout
