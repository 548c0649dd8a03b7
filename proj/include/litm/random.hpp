#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "litm/common.hpp"

namespace litm {

// Deterministic random source: same seed, same draw sequence. The engine is
// mt19937_64 (whose output stream the standard fully specifies) and every
// distribution transform is implemented here, so sequences do not depend on
// the standard library vendor. Single consumer; never share across threads.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampled, no modulo bias.
  std::int64_t uniform_int(std::int64_t n);

  // Standard normal via Box-Muller; the paired variate is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(static_cast<std::int64_t>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace litm
