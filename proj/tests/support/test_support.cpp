#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace shufflelab::testsupport {

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape mismatch");
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Mat transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

double max_abs(const Mat& m) {
  double best = 0.0;
  for (double x : m.data()) best = std::max(best, std::abs(x));
  return best;
}

double uniform(RandomStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_double();
}

int uniform_int(RandomStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

Vec random_vec(RandomStream& rng, std::size_t dim) {
  Vec v(dim);
  for (double& x : v) x = uniform(rng, -1.0, 1.0);
  return v;
}

std::vector<int> random_permutation(RandomStream& rng, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(uniform_int(rng, 0, i))]);
  return perm;
}

DiscreteDistribution random_law(RandomStream& rng, int dim, int n_atoms,
                                int span, double deficit) {
  std::set<LatticeKey> keys;
  while (static_cast<int>(keys.size()) < n_atoms) {
    LatticeKey key(static_cast<std::size_t>(dim), 0);
    for (auto& c : key) c = uniform_int(rng, -span, span);
    keys.insert(key);
  }
  std::vector<Atom> atoms;
  double total = 0.0;
  for (const LatticeKey& key : keys) {
    const double w = 0.05 + rng.next_double();
    atoms.push_back(Atom{key, w});
    total += w;
  }
  for (Atom& a : atoms) a.mass *= (1.0 - deficit) / total;
  return DiscreteDistribution::from_atoms(dim, std::move(atoms), deficit);
}

BinaryExperiment random_experiment(RandomStream& rng, int dim, int n_atoms,
                                   int span) {
  DiscreteDistribution null_law = random_law(rng, dim, n_atoms, span, 0.0);
  // Reuse a fraction of the null support so the pair genuinely overlaps.
  DiscreteDistribution::AccumulatorMap accum;
  double total = 0.0;
  for (const Atom& a : null_law.atoms()) {
    if (rng.next_double() < 0.6) {
      const double w = 0.05 + rng.next_double();
      accum[a.key] += w;
      total += w;
    }
  }
  const int fresh = std::max(1, n_atoms / 2);
  for (int i = 0; i < fresh; ++i) {
    LatticeKey key(static_cast<std::size_t>(dim), 0);
    for (auto& c : key) c = uniform_int(rng, -span, span);
    const double w = 0.05 + rng.next_double();
    accum[key] += w;
    total += w;
  }
  std::vector<Atom> atoms;
  atoms.reserve(accum.size());
  for (const auto& [key, w] : accum) atoms.push_back(Atom{key, w / total});
  return BinaryExperiment(std::move(null_law),
                          DiscreteDistribution::from_atoms(dim, std::move(atoms), 0.0));
}

RandomizerScenario random_scenario(RandomStream& rng) {
  const int d = uniform_int(rng, 3, 6);
  const bool overlap = rng.next_double() < 0.5;
  const std::vector<int> perm = random_permutation(rng, d);

  int s0 = uniform_int(rng, 1, 2);
  int s1 = uniform_int(rng, 1, 2);
  std::vector<int> d0, d1;
  if (overlap) {
    s0 = uniform_int(rng, 2, std::min(3, d));
    const int shared = uniform_int(rng, 1, s0 - 1);
    s1 = std::min(uniform_int(rng, shared, shared + 1), d - (s0 - shared));
    s1 = std::max(s1, shared);
    for (int i = 0; i < s0; ++i) d0.push_back(perm[static_cast<std::size_t>(i)]);
    for (int i = 0; i < s1; ++i)
      d1.push_back(perm[static_cast<std::size_t>(s0 - shared + i)]);
  } else {
    s1 = std::min(s1, d - s0);
    for (int i = 0; i < s0; ++i) d0.push_back(perm[static_cast<std::size_t>(i)]);
    for (int i = 0; i < s1; ++i) d1.push_back(perm[static_cast<std::size_t>(s0 + i)]);
  }
  std::sort(d0.begin(), d0.end());
  std::sort(d1.begin(), d1.end());

  auto random_conditional = [&](std::size_t size) {
    Vec p(size);
    double total = 0.0;
    for (double& x : p) {
      x = 0.5 + rng.next_double();
      total += x;
    }
    for (double& x : p) x /= total;
    return p;
  };

  RandomizerScenario sc;
  std::vector<std::string> symbols;
  for (int i = 0; i < d; ++i) symbols.push_back("s" + std::to_string(i));
  sc.alphabet = AlphabetSpec::from_symbols(symbols);
  sc.ds.d0 = d0;
  sc.ds.d1 = d1;
  sc.ds.p0 = random_conditional(d0.size());
  sc.ds.p1 = random_conditional(d1.size());
  sc.ds.alpha0.assign(static_cast<std::size_t>(d), 0.0);
  sc.ds.alpha1.assign(static_cast<std::size_t>(d), 0.0);
  auto in_set = [](const std::vector<int>& s, int y) {
    return std::find(s.begin(), s.end(), y) != s.end();
  };
  for (int y = 0; y < d; ++y) {
    if (!in_set(d0, y) && rng.next_double() < 0.6)
      sc.ds.alpha0[static_cast<std::size_t>(y)] = uniform(rng, 0.05, 1.0);
    if (!in_set(d1, y) && rng.next_double() < 0.6)
      sc.ds.alpha1[static_cast<std::size_t>(y)] = uniform(rng, 0.05, 1.0);
  }
  sc.pi_limit = uniform(rng, 0.3, 0.7);
  sc.composition = rng.next_double() < 0.75 ? CompositionRule::proportional()
                                            : CompositionRule::fixed(uniform_int(rng, 1, 3));
  if (rng.next_double() < 0.3) {
    sc.correction0.assign(static_cast<std::size_t>(d), 0.0);
    sc.correction1.assign(static_cast<std::size_t>(d), 0.0);
    for (int y : d0) sc.correction0[static_cast<std::size_t>(y)] = uniform(rng, -0.1, 0.1);
    for (int y : d1) sc.correction1[static_cast<std::size_t>(y)] = uniform(rng, -0.1, 0.1);
  }
  sc.validate();
  return sc;
}

std::map<LatticeKey, double> brute_force_transcript(const RealizedRandomizer& rr,
                                                    int k) {
  const std::size_t d = rr.w0.size();
  std::map<LatticeKey, double> law;
  law[LatticeKey(d, 0)] = 1.0;
  auto draw_one = [&](const Vec& w) {
    std::map<LatticeKey, double> next;
    for (const auto& [key, mass] : law) {
      for (std::size_t y = 0; y < d; ++y) {
        if (w[y] == 0.0) continue;
        LatticeKey moved = key;
        ++moved[y];
        next[moved] += mass * w[y];
      }
    }
    law = std::move(next);
  };
  for (int i = 0; i < rr.n - k; ++i) draw_one(rr.w0);
  for (int i = 0; i < k; ++i) draw_one(rr.w1);
  return law;
}

}  // namespace shufflelab::testsupport
