#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace shufflelab {

// Integer lattice point: counts per alphabet symbol, per jump atom, or a
// quantized embedded coordinate.  Comparison and hashing are exact integer
// operations; dimension is fixed per distribution.
using LatticeKey = std::vector<std::int64_t>;

struct LatticeKeyHash {
  std::size_t operator()(const LatticeKey& k) const noexcept {
    // FNV-1a over the coordinate bytes with a final avalanche mix.
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t c : k) {
      auto u = static_cast<std::uint64_t>(c);
      for (int i = 0; i < 8; ++i) {
        h ^= (u >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

inline LatticeKey concat_keys(const LatticeKey& a, const LatticeKey& b) {
  LatticeKey out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline LatticeKey add_keys(const LatticeKey& a, const LatticeKey& b) {
  LatticeKey out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

}  // namespace shufflelab
