#include "shufflelab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shufflelab {

namespace {
constexpr double kNormalizationSlack = 1e-12;

bool key_less(const LatticeKey& a, const LatticeKey& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}
}  // namespace

void DiscreteDistribution::validate() const {
  for (const Atom& a : atoms_) {
    if (static_cast<int>(a.key.size()) != key_dim_)
      throw std::invalid_argument("DiscreteDistribution: key dimension mismatch");
    if (!(a.mass > 0.0)) throw std::invalid_argument("DiscreteDistribution: nonpositive atom mass");
  }
  if (deficit_ < 0.0) throw std::invalid_argument("DiscreteDistribution: negative deficit");
  const double total = total_mass_ + deficit_;
  if (std::abs(total - 1.0) > kNormalizationSlack)
    throw std::invalid_argument("DiscreteDistribution: mass + deficit = " + std::to_string(total) +
                                " is not within 1e-12 of 1");
}

DiscreteDistribution DiscreteDistribution::from_atoms(int key_dim, std::vector<Atom> atoms,
                                                      double deficit) {
  DiscreteDistribution d;
  d.key_dim_ = key_dim;
  d.atoms_ = std::move(atoms);
  std::sort(d.atoms_.begin(), d.atoms_.end(),
            [](const Atom& a, const Atom& b) { return key_less(a.key, b.key); });
  for (std::size_t i = 1; i < d.atoms_.size(); ++i)
    if (d.atoms_[i - 1].key == d.atoms_[i].key)
      throw std::invalid_argument("DiscreteDistribution: duplicate key");
  d.deficit_ = deficit;
  double total = 0.0;
  for (const Atom& a : d.atoms_) total += a.mass;
  d.total_mass_ = total;
  d.validate();
  return d;
}

DiscreteDistribution DiscreteDistribution::from_map(int key_dim, const AccumulatorMap& accum,
                                                    double prune_rel, double carried_deficit) {
  double total = 0.0;
  for (const auto& [key, mass] : accum) total += mass;
  const double threshold = prune_rel * total;

  DiscreteDistribution d;
  d.key_dim_ = key_dim;
  d.atoms_.reserve(accum.size());
  double pruned = 0.0;
  for (const auto& [key, mass] : accum) {
    if (mass <= 0.0) continue;
    if (mass < threshold) {
      pruned += mass;
    } else {
      d.atoms_.push_back({key, mass});
    }
  }
  std::sort(d.atoms_.begin(), d.atoms_.end(),
            [](const Atom& a, const Atom& b) { return key_less(a.key, b.key); });
  // Recompute retained mass in sorted order for deterministic rounding.
  double retained = 0.0;
  for (const Atom& a : d.atoms_) retained += a.mass;
  d.total_mass_ = retained;
  d.deficit_ = carried_deficit + pruned + (total - pruned - retained);
  if (d.deficit_ < 0.0 && d.deficit_ > -1e-15) d.deficit_ = 0.0;
  d.validate();
  return d;
}

DiscreteDistribution DiscreteDistribution::point_mass(LatticeKey key) {
  return from_atoms(static_cast<int>(key.size()), {{std::move(key), 1.0}}, 0.0);
}

Vec DiscreteDistribution::embedded_point(std::size_t i) const {
  const int ed = embed_dim();
  Vec out(static_cast<std::size_t>(ed));
  for (int j = 0; j < ed; ++j) out[static_cast<std::size_t>(j)] = embedding_[i * ed + j];
  return out;
}

DiscreteDistribution DiscreteDistribution::with_embedding(
    int embed_dim, const std::function<Vec(const LatticeKey&)>& fn) const {
  if (embed_dim <= 0) throw std::invalid_argument("with_embedding: dimension must be positive");
  DiscreteDistribution d = *this;
  d.embed_dim_ = embed_dim;
  d.embedding_.assign(atoms_.size() * static_cast<std::size_t>(embed_dim), 0.0);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    Vec v = fn(atoms_[i].key);
    if (static_cast<int>(v.size()) != embed_dim)
      throw std::invalid_argument("with_embedding: embedding function dimension mismatch");
    for (int j = 0; j < embed_dim; ++j)
      d.embedding_[i * static_cast<std::size_t>(embed_dim) + static_cast<std::size_t>(j)] =
          v[static_cast<std::size_t>(j)];
  }
  return d;
}

DiscreteDistribution DiscreteDistribution::without_embedding() const {
  DiscreteDistribution d = *this;
  d.embed_dim_.reset();
  d.embedding_.clear();
  return d;
}

double DiscreteDistribution::mass_at(const LatticeKey& key) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                             [](const Atom& a, const LatticeKey& k) { return key_less(a.key, k); });
  if (it != atoms_.end() && it->key == key) return it->mass;
  return 0.0;
}

DiscreteDistribution pushforward(const DiscreteDistribution& p,
                                 const std::function<LatticeKey(const LatticeKey&)>& f,
                                 int out_dim) {
  DiscreteDistribution::AccumulatorMap accum;
  accum.reserve(p.atoms().size());
  for (const Atom& a : p.atoms()) {
    LatticeKey image = f(a.key);
    if (static_cast<int>(image.size()) != out_dim)
      throw std::invalid_argument("pushforward: image key dimension mismatch");
    accum[std::move(image)] += a.mass;
  }
  return DiscreteDistribution::from_map(out_dim, accum, 0.0, p.deficit());
}

DiscreteDistribution product(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::vector<Atom> atoms;
  atoms.reserve(p.atoms().size() * q.atoms().size());
  for (const Atom& a : p.atoms())
    for (const Atom& b : q.atoms()) atoms.push_back({concat_keys(a.key, b.key), a.mass * b.mass});
  const double deficit = p.deficit() + q.deficit() - p.deficit() * q.deficit();
  return DiscreteDistribution::from_atoms(p.key_dim() + q.key_dim(), std::move(atoms), deficit);
}

DiscreteDistribution translate(const DiscreteDistribution& p, const LatticeKey& key_offset,
                               const Vec* embed_offset) {
  if (static_cast<int>(key_offset.size()) != p.key_dim())
    throw std::invalid_argument("translate: offset dimension mismatch");
  std::vector<Atom> atoms = p.atoms();
  for (Atom& a : atoms) a.key = add_keys(a.key, key_offset);
  DiscreteDistribution out =
      DiscreteDistribution::from_atoms(p.key_dim(), std::move(atoms), p.deficit());
  if (p.has_embedding()) {
    const int ed = p.embed_dim();
    if (embed_offset != nullptr && static_cast<int>(embed_offset->size()) != ed)
      throw std::invalid_argument("translate: embedding offset dimension mismatch");
    // Keys were shifted monotonically, so atom order (and embedding order) is preserved.
    std::vector<double> data = p.embedding_data();
    if (embed_offset != nullptr)
      for (std::size_t i = 0; i < p.atoms().size(); ++i)
        for (int j = 0; j < ed; ++j)
          data[i * static_cast<std::size_t>(ed) + static_cast<std::size_t>(j)] +=
              (*embed_offset)[static_cast<std::size_t>(j)];
    // Rebuild via with_embedding to keep the invariant in one place.
    std::size_t idx = 0;
    out = out.with_embedding(ed, [&](const LatticeKey&) {
      Vec v(static_cast<std::size_t>(ed));
      for (int j = 0; j < ed; ++j)
        v[static_cast<std::size_t>(j)] =
            data[idx * static_cast<std::size_t>(ed) + static_cast<std::size_t>(j)];
      ++idx;
      return v;
    });
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<DiscreteDistribution> align_by_embedding(
    const std::vector<const DiscreteDistribution*>& laws, double tol) {
  if (laws.empty()) return {};
  if (!(tol > 0.0)) throw std::invalid_argument("align_by_embedding: tol must be positive");
  const int ed = laws[0]->has_embedding() ? laws[0]->embed_dim() : -1;
  if (ed <= 0) throw std::invalid_argument("align_by_embedding: laws must carry embeddings");
  for (const auto* law : laws)
    if (!law->has_embedding() || law->embed_dim() != ed)
      throw std::invalid_argument("align_by_embedding: embedding dimension mismatch");

  // Stage 1: snap points to the fine grid (cell = tol); exact-tuple groups.
  struct FineGroup {
    Vec rep;        // lexicographically smallest member point
    LatticeKey id;  // snapped tuple
  };
  std::unordered_map<LatticeKey, std::size_t, LatticeKeyHash> fine_index;
  std::vector<FineGroup> groups;
  // Per (law, atom): fine group index.
  std::vector<std::vector<std::size_t>> member(laws.size());

  for (std::size_t li = 0; li < laws.size(); ++li) {
    const auto& law = *laws[li];
    member[li].resize(law.atoms().size());
    for (std::size_t ai = 0; ai < law.atoms().size(); ++ai) {
      Vec pt = law.embedded_point(ai);
      LatticeKey snapped(static_cast<std::size_t>(ed));
      for (int j = 0; j < ed; ++j)
        snapped[static_cast<std::size_t>(j)] =
            llround(pt[static_cast<std::size_t>(j)] / tol);
      auto [it, inserted] = fine_index.try_emplace(snapped, groups.size());
      if (inserted) {
        groups.push_back({pt, snapped});
      } else if (std::lexicographical_compare(pt.begin(), pt.end(), groups[it->second].rep.begin(),
                                              groups[it->second].rep.end())) {
        groups[it->second].rep = pt;
      }
      member[li][ai] = it->second;
    }
  }

  // Stage 2: union fine groups whose representatives are within tol.  Coarse
  // cells of width 4*tol; a representative is compared against neighbors only
  // in directions where it sits within tol of a cell boundary.
  const double coarse = 4.0 * tol;
  std::unordered_map<LatticeKey, std::vector<std::size_t>, LatticeKeyHash> coarse_cells;
  std::vector<LatticeKey> coarse_of(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    LatticeKey cell(static_cast<std::size_t>(ed));
    for (int j = 0; j < ed; ++j)
      cell[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(
          std::floor(groups[g].rep[static_cast<std::size_t>(j)] / coarse));
    coarse_of[g] = cell;
    coarse_cells[cell].push_back(g);
  }

  UnionFind uf(groups.size());
  const double tol_sq = tol * tol;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Vec& pt = groups[g].rep;
    // Allowed neighbor offsets per coordinate.
    std::vector<std::vector<std::int64_t>> offsets(static_cast<std::size_t>(ed));
    for (int j = 0; j < ed; ++j) {
      auto& offs = offsets[static_cast<std::size_t>(j)];
      offs.push_back(0);
      const double base = static_cast<double>(coarse_of[g][static_cast<std::size_t>(j)]) * coarse;
      const double frac = pt[static_cast<std::size_t>(j)] - base;
      if (frac < tol) offs.push_back(-1);
      if (frac > coarse - tol) offs.push_back(1);
    }
    // Enumerate the (usually singleton) product of offsets.
    std::vector<std::size_t> cursor(static_cast<std::size_t>(ed), 0);
    while (true) {
      LatticeKey cell = coarse_of[g];
      for (int j = 0; j < ed; ++j)
        cell[static_cast<std::size_t>(j)] += offsets[static_cast<std::size_t>(j)][cursor[static_cast<std::size_t>(j)]];
      auto it = coarse_cells.find(cell);
      if (it != coarse_cells.end()) {
        for (std::size_t other : it->second) {
          if (other == g) continue;
          if (sq_dist(pt, groups[other].rep) <= tol_sq) uf.unite(g, other);
        }
      }
      int j = 0;
      for (; j < ed; ++j) {
        auto& c = cursor[static_cast<std::size_t>(j)];
        if (++c < offsets[static_cast<std::size_t>(j)].size()) break;
        c = 0;
      }
      if (j == ed) break;
    }
  }

  // Collect clusters; pick canonical key (lexicographically smallest snapped
  // tuple) and verify the no-ambiguity contract.
  std::unordered_map<std::size_t, std::size_t> cluster_index;  // root -> cluster
  struct Cluster {
    LatticeKey key;
    Vec rep;
    Vec lo, hi;  // bounding box of member representatives
  };
  std::vector<Cluster> clusters;
  std::vector<std::size_t> cluster_of_group(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t root = uf.find(g);
    auto [it, inserted] = cluster_index.try_emplace(root, clusters.size());
    if (inserted)
      clusters.push_back({groups[g].id, groups[g].rep, groups[g].rep, groups[g].rep});
    Cluster& cl = clusters[it->second];
    cluster_of_group[g] = it->second;
    if (!inserted) {
      if (std::lexicographical_compare(groups[g].id.begin(), groups[g].id.end(), cl.key.begin(),
                                       cl.key.end())) {
        cl.key = groups[g].id;
        cl.rep = groups[g].rep;
      }
      for (int j = 0; j < ed; ++j) {
        auto ju = static_cast<std::size_t>(j);
        cl.lo[ju] = std::min(cl.lo[ju], groups[g].rep[ju]);
        cl.hi[ju] = std::max(cl.hi[ju], groups[g].rep[ju]);
      }
    }
  }
  for (const Cluster& cl : clusters) {
    double diag_sq = 0.0;
    for (int j = 0; j < ed; ++j) {
      auto ju = static_cast<std::size_t>(j);
      const double d = cl.hi[ju] - cl.lo[ju];
      diag_sq += d * d;
    }
    if (diag_sq > (tol / 50.0) * (tol / 50.0))
      throw std::runtime_error(
          "align_by_embedding: distinct embedded points within grouping tolerance "
          "(ambiguous identification)");
  }

  // Rebuild each law on the shared key space.
  std::vector<DiscreteDistribution> out;
  out.reserve(laws.size());
  for (std::size_t li = 0; li < laws.size(); ++li) {
    DiscreteDistribution::AccumulatorMap accum;
    for (std::size_t ai = 0; ai < laws[li]->atoms().size(); ++ai) {
      const Cluster& cl = clusters[cluster_of_group[member[li][ai]]];
      accum[cl.key] += laws[li]->atoms()[ai].mass;
    }
    DiscreteDistribution rekeyed =
        DiscreteDistribution::from_map(ed, accum, 0.0, laws[li]->deficit());
    // Attach representative points as the embedding of the shared space.
    std::unordered_map<LatticeKey, const Vec*, LatticeKeyHash> reps;
    for (const Cluster& cl : clusters) reps[cl.key] = &cl.rep;
    out.push_back(rekeyed.with_embedding(
        ed, [&](const LatticeKey& k) -> Vec { return *reps.at(k); }));
  }
  return out;
}

}  // namespace shufflelab
