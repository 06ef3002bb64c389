#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "shufflelab/lattice_key.hpp"
#include "shufflelab/linalg.hpp"

namespace shufflelab {

struct Atom {
  LatticeKey key;
  double mass;
};

// Finite discrete law on an integer lattice with explicit accounting of
// truncated/pruned mass (the deficit).  Atoms are kept sorted by key; all
// masses are strictly positive; sum(mass) + deficit stays within 1e-12 of 1.
//
// A law may carry an optional per-atom embedding: a real vector (the value of
// a statistic at that atom), used to identify atoms of different laws that
// occupy the same embedded point.  Laws are comparable only when both the key
// dimension and the embedding dimension (or absence) agree.
class DiscreteDistribution {
 public:
  using AccumulatorMap = std::unordered_map<LatticeKey, double, LatticeKeyHash>;

  DiscreteDistribution() = default;

  // Exact atoms, already distinct; validates and sorts.
  static DiscreteDistribution from_atoms(int key_dim, std::vector<Atom> atoms,
                                         double deficit = 0.0);
  // From an accumulator map; atoms below prune_rel * total retained mass are
  // moved into the deficit.  carried_deficit is added on top.
  static DiscreteDistribution from_map(int key_dim, const AccumulatorMap& accum,
                                       double prune_rel, double carried_deficit);
  static DiscreteDistribution point_mass(LatticeKey key);

  int key_dim() const { return key_dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double deficit() const { return deficit_; }
  double total_mass() const { return total_mass_; }

  bool has_embedding() const { return embed_dim_.has_value(); }
  int embed_dim() const { return embed_dim_.value(); }
  // Embedded point of atom i (flat storage, embed_dim entries per atom).
  Vec embedded_point(std::size_t i) const;
  const std::vector<double>& embedding_data() const { return embedding_; }

  // Returns a copy carrying per-atom embedded coordinates computed from keys.
  DiscreteDistribution with_embedding(int embed_dim,
                                      const std::function<Vec(const LatticeKey&)>& fn) const;
  // Returns a copy with the embedding removed.
  DiscreteDistribution without_embedding() const;

  // Mass at a key (0 if absent).
  double mass_at(const LatticeKey& key) const;

 private:
  void validate() const;

  int key_dim_ = 0;
  std::vector<Atom> atoms_;
  double deficit_ = 0.0;
  double total_mass_ = 0.0;
  std::optional<int> embed_dim_;
  std::vector<double> embedding_;  // atoms_.size() * embed_dim_, aligned with atoms_
};

// Image law under a total key map; masses of colliding image keys are summed;
// the deficit is preserved.  Any embedding is dropped (image atoms may merge
// points with different embedded values).
DiscreteDistribution pushforward(const DiscreteDistribution& p,
                                 const std::function<LatticeKey(const LatticeKey&)>& f,
                                 int out_dim);

// Independent product: keys concatenated, masses multiplied,
// deficit = d_p + d_q - d_p * d_q.  Embeddings are dropped.
DiscreteDistribution product(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Exact lattice translation; optional embedding translation for embedded laws.
DiscreteDistribution translate(const DiscreteDistribution& p, const LatticeKey& key_offset,
                               const Vec* embed_offset = nullptr);

// Re-keys embedded laws onto one shared key space: atoms (across all input
// laws) whose embedded points lie within `tol` of each other are identified.
// Output keys are quantized representative tuples; each output law carries the
// representative point as its embedding.  Points merged into one group must
// agree to within tol/50 (genuinely distinct points inside the tolerance are
// ambiguous and raise an error).
std::vector<DiscreteDistribution> align_by_embedding(
    const std::vector<const DiscreteDistribution*>& laws, double tol);

}  // namespace shufflelab
