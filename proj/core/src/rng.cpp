#include "shufflelab/rng.hpp"

#include <stdexcept>

namespace shufflelab {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t RandomStream::next_u64() {
  return splitmix64(seed_ ^ splitmix64(++counter_));
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RandomStream RandomStream::split(std::uint64_t tag) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(tag ^ 0xa5a5a5a5a5a5a5a5ull)));
}

std::size_t sample_categorical(const std::vector<double>& p, RandomStream& rng) {
  if (p.empty()) throw std::invalid_argument("sample_categorical: empty weight vector");
  double total = 0.0;
  for (double w : p) {
    if (w < 0.0) throw std::invalid_argument("sample_categorical: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("sample_categorical: zero total weight");
  const double u = rng.next_double() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (u < cum) return i;
  }
  // Rounding can push u past the last partial sum; return last positive entry.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return p.size() - 1;
}

}  // namespace shufflelab
