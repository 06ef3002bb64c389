#pragma once

#include <cstdint>
#include <vector>

namespace shufflelab {

// Counter-based pseudo-random stream: splitmix64 applied to (seed, counter).
// Fully reproducible across platforms from a documented 64-bit seed, and
// splittable by deriving child seeds.  Not cryptographic.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  // Uniform double in [0, 1) with 53 random bits.
  double next_double();
  // Child stream with an independent-looking seed derived from (seed, tag).
  RandomStream split(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Inverse-CDF categorical draw: returns index i with probability p[i] / sum(p).
// Deterministic tie-breaking; p entries must be nonnegative.
std::size_t sample_categorical(const std::vector<double>& p, RandomStream& rng);

}  // namespace shufflelab
