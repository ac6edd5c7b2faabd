#pragma once

#include <cmath>
#include <cstdint>

namespace qcs {

// Deterministic random engine (xoshiro256++) with explicit substreams.
//
// std::mt19937 + <random> distributions are not bit-identical across
// standard library implementations, and reproducibility of whole scenario
// runs from a single seed is part of the CLI contract. So both the engine
// and the distributions live here, fully specified.
class RandomEngine {
 public:
  RandomEngine() : RandomEngine(0x853c49e6748fea9bULL, 0) {}

  // One engine per (seed, stream) pair; streams are cheap and independent,
  // letting every instance of a simulation own its own reproducible source
  // regardless of evaluation order.
  RandomEngine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed;
    const std::uint64_t salt = splitmix_next(x);
    x = salt ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    for (auto& word : s_) word = splitmix_next(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // never all-zero
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit mantissa.
  double uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given mean; 1 - uniform() lies in (0, 1] so the log
  // never sees zero.
  double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; the paired value is cached.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Normal truncated to +/- bound standard deviations by regeneration, so a
  // single detection can never pick up a physically absurd jitter excursion.
  double gaussian_truncated(double bound = 5.0) {
    double z = gaussian();
    while (std::fabs(z) > bound) z = gaussian();
    return z;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  static std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qcs
