#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace causelab {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so any consumer can reproduce any draw without
// replaying the ones before it. Stream discipline used across the library:
//   SCM noise           stream = variable index, counter = 2*row (+1)
//   permutation tests   stream = permutation index
//   generators          stream = fixed per scenario column
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t counter) {
  std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL);
  x = mix64(x ^ (stream * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
  x = mix64(x ^ (counter * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
  return mix64(x);
}

// Uniform in the open interval (0, 1); 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (static_cast<double>(counter_hash(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal from two uniforms (Box-Muller, cosine branch).
inline double box_muller(double u1, double u2) {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential view over one stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return counter_hash(seed_, stream_, counter_++); }
  double uniform() { return counter_uniform(seed_, stream_, counter_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return box_muller(u1, u2);
  }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift; the bias is < n / 2^64.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates permutation of 0..n-1 drawn from one stream.
inline std::vector<int> random_permutation(int n, std::uint64_t seed, std::uint64_t stream) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  RngStream rng(seed, stream);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace causelab
