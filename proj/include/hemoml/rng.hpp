#pragma once

// Deterministic random streams for the whole pipeline.
//
// Every stochastic component draws from an RngStream derived from the master
// seed plus a fixed tag path (subject index, disease kind, fold, tree, ...).
// Streams are independent of each other's consumption state, so parallel
// work produces bit-identical results regardless of scheduling.
//
// The generator is xoshiro256++ seeded through splitmix64. Distribution
// mappings (uniform, normal) are implemented here rather than taken from
// <random> so that output is bit-stable across standard libraries.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace hemoml {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t key, std::uint64_t value) {
  // boost-style hash combine followed by a splitmix finalisation round
  key ^= value + kGolden + (key << 6) + (key >> 2);
  std::uint64_t s = key;
  return splitmix64(s);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Seeded xoshiro256++ stream with stable child-stream derivation.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : key_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  /// Derive an independent stream from this stream's key and a tag path.
  /// Derivation ignores how much this stream has already been consumed.
  RngStream child(std::initializer_list<std::uint64_t> tags) const {
    std::uint64_t key = key_;
    for (std::uint64_t t : tags) key = detail::mix_key(key, t);
    return RngStream(key);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + u01() * (hi - lo); }

  /// Integer in [0, n), n > 0. Widening-multiply mapping.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  bool coin() { return (next_u64() & 1ULL) != 0; }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// exp(N(0, sigma^2)) with unit median.
  double log_normal(double sigma) { return std::exp(sigma * normal()); }

  /// Poisson(1) count via inversion; used for order-independent bootstraps.
  int poisson_unit() {
    const double u = u01();
    double p = 0.36787944117144233; // exp(-1)
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < 64) {
      ++k;
      p /= static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  std::uint64_t key() const { return key_; }

private:
  std::uint64_t state_[4];
  std::uint64_t key_;
};

// Fixed tag values for stream derivation; every consumer goes through these
// so seeds never collide between pipeline stages.
namespace rng_tag {
inline constexpr std::uint64_t kSubject = 0x53554213;
inline constexpr std::uint64_t kDisease = 0x44495345;
inline constexpr std::uint64_t kFold = 0x464f4c44;
inline constexpr std::uint64_t kCell = 0x43454c4c;
inline constexpr std::uint64_t kTree = 0x54524545;
inline constexpr std::uint64_t kNode = 0x4e4f4445;
inline constexpr std::uint64_t kMlp = 0x4d4c5000;
inline constexpr std::uint64_t kPlan = 0x504c414e;
} // namespace rng_tag

} // namespace hemoml
