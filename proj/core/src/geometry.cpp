#include "shufflelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace shufflelab {

namespace {

void check_sorted_indices(const std::vector<int>& d, int alphabet_size, const char* name) {
  if (d.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0 || d[i] >= alphabet_size)
      throw std::invalid_argument(std::string(name) + " contains an out-of-range symbol index");
    if (i > 0 && d[i] <= d[i - 1])
      throw std::invalid_argument(std::string(name) + " must be strictly increasing");
  }
}

void check_simplex(const std::vector<double>& p, std::size_t expected, const char* name) {
  if (p.size() != expected)
    throw std::invalid_argument(std::string(name) + " must align with its dominant set");
  double sum = 0.0;
  for (double x : p) {
    if (!(x > 0.0)) throw std::invalid_argument(std::string(name) + " entries must be positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(name) + " must sum to one");
}

void check_intensities(const std::vector<double>& alpha, const std::vector<int>& own_dominant,
                       int alphabet_size, const char* name) {
  if (static_cast<int>(alpha.size()) != alphabet_size)
    throw std::invalid_argument(std::string(name) + " must have one entry per symbol");
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument(std::string(name) + " entries must be finite and nonnegative");
  }
  for (int y : own_dominant) {
    if (alpha[static_cast<std::size_t>(y)] != 0.0)
      throw std::invalid_argument(std::string(name) +
                                  " must vanish on the matching dominant set");
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

bool vectors_match(const Vec& a, const Vec& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

}  // namespace

AlphabetSpec AlphabetSpec::from_symbols(std::vector<std::string> symbols) {
  if (symbols.empty()) throw std::invalid_argument("alphabet must be nonempty");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw std::invalid_argument("alphabet symbols must be nonempty strings");
    if (!seen.insert(s).second)
      throw std::invalid_argument("alphabet symbols must be distinct: duplicate \"" + s + "\"");
  }
  AlphabetSpec spec;
  spec.symbols = std::move(symbols);
  return spec;
}

int AlphabetSpec::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] == label) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown alphabet symbol \"" + label + "\"");
}

void DominantStructure::validate(int alphabet_size) const {
  check_sorted_indices(d0, alphabet_size, "d0");
  check_sorted_indices(d1, alphabet_size, "d1");
  check_simplex(p0, d0.size(), "p0");
  check_simplex(p1, d1.size(), "p1");
  check_intensities(alpha0, d0, alphabet_size, "alpha0");
  check_intensities(alpha1, d1, alphabet_size, "alpha1");
}

std::vector<std::vector<int>> components(const std::vector<int>& d0,
                                         const std::vector<int>& d1) {
  std::vector<int> members;
  members.insert(members.end(), d0.begin(), d0.end());
  members.insert(members.end(), d1.begin(), d1.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  const int m = static_cast<int>(members.size());

  std::vector<int> slot(members.empty() ? 0 : static_cast<std::size_t>(members.back()) + 1, -1);
  for (int i = 0; i < m; ++i) slot[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = i;

  UnionFind uf(m);
  auto connect = [&](const std::vector<int>& d) {
    for (std::size_t i = 1; i < d.size(); ++i)
      uf.unite(slot[static_cast<std::size_t>(d[0])], slot[static_cast<std::size_t>(d[i])]);
  };
  connect(d0);
  connect(d1);

  std::vector<std::vector<int>> result;
  std::vector<int> root_to_out(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const int r = uf.find(i);
    if (root_to_out[static_cast<std::size_t>(r)] < 0) {
      root_to_out[static_cast<std::size_t>(r)] = static_cast<int>(result.size());
      result.emplace_back();
    }
    result[static_cast<std::size_t>(root_to_out[static_cast<std::size_t>(r)])].push_back(
        members[static_cast<std::size_t>(i)]);
  }
  // Members were scanned in increasing order, so each component is sorted and
  // components are ordered by smallest member already.
  return result;
}

QuotientGeometry build_geometry(const AlphabetSpec& alphabet, const DominantStructure& ds,
                                double pi) {
  const int dim = alphabet.size();
  ds.validate(dim);
  if (!(pi >= 0.0 && pi <= 1.0))
    throw std::invalid_argument("mixing weight must lie in [0, 1]");

  QuotientGeometry g;
  g.dim = dim;
  g.pi = pi;
  g.d0 = ds.d0;
  g.d1 = ds.d1;

  const std::size_t udim = static_cast<std::size_t>(dim);

  // Dominant means.
  g.mu0.assign(udim, 0.0);
  g.mu1.assign(udim, 0.0);
  for (std::size_t i = 0; i < ds.d0.size(); ++i)
    g.mu0[static_cast<std::size_t>(ds.d0[i])] = ds.p0[i];
  for (std::size_t i = 0; i < ds.d1.size(); ++i)
    g.mu1[static_cast<std::size_t>(ds.d1[i])] = ds.p1[i];

  // Tangent spans: e_y - mu_b over the dominant symbols of each side.
  std::vector<Vec> spanning;
  auto add_span = [&](const std::vector<int>& d, const Vec& mu) {
    for (int y : d) {
      Vec v = scale(mu, -1.0);
      v[static_cast<std::size_t>(y)] += 1.0;
      spanning.push_back(std::move(v));
    }
  };
  add_span(ds.d0, g.mu0);
  add_span(ds.d1, g.mu1);

  const std::vector<Vec> basis = orthonormal_basis(spanning);
  g.proj_g = projector_onto(basis, dim);
  g.proj_j = matsub_from_identity(g.proj_g);

  // Components of the dominant hypergraph and their quotient atoms.
  g.components = components(ds.d0, ds.d1);
  g.component_index.assign(udim, -1);
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    for (int y : g.components[c]) g.component_index[static_cast<std::size_t>(y)] = static_cast<int>(c);
  }

  g.quotient_points.resize(udim);
  for (int y = 0; y < dim; ++y) {
    Vec e(udim, 0.0);
    e[static_cast<std::size_t>(y)] = 1.0;
    g.quotient_points[static_cast<std::size_t>(y)] = matvec(g.proj_j, e);
  }

  g.component_atoms.resize(g.components.size());
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    // The quotient point is constant on a component; average for symmetry.
    Vec acc(udim, 0.0);
    for (int y : g.components[c])
      acc = add(acc, g.quotient_points[static_cast<std::size_t>(y)]);
    g.component_atoms[c] = scale(acc, 1.0 / static_cast<double>(g.components[c].size()));
  }

  g.m0 = matvec(g.proj_j, g.mu0);
  g.m1 = matvec(g.proj_j, g.mu1);
  g.delta_shift = matvec(g.proj_j, sub(g.mu1, g.mu0));

  // Single-draw dominant covariances and the mixed covariance.
  g.gamma0 = Mat(dim, dim);
  g.gamma1 = Mat(dim, dim);
  auto fill_gamma = [&](Mat& gamma, const std::vector<int>& d, const std::vector<double>& p,
                        const Vec& mu) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      Vec v = scale(mu, -1.0);
      v[static_cast<std::size_t>(d[i])] += 1.0;
      add_outer(gamma, v, p[i]);
    }
  };
  fill_gamma(g.gamma0, ds.d0, ds.p0, g.mu0);
  fill_gamma(g.gamma1, ds.d1, ds.p1, g.mu1);
  g.sigma = matadd(matscale(g.gamma0, 1.0 - pi), matscale(g.gamma1, pi));

  // Jumps: one per (side, symbol outside that side's dominant set).
  for (int b = 0; b < 2; ++b) {
    const std::vector<int>& d = (b == 0) ? ds.d0 : ds.d1;
    const Vec& mb = (b == 0) ? g.m0 : g.m1;
    for (int y = 0; y < dim; ++y) {
      if (std::binary_search(d.begin(), d.end(), y)) continue;
      JumpVector j;
      j.source = b;
      j.symbol = y;
      j.vector = sub(g.quotient_points[static_cast<std::size_t>(y)], mb);
      j.group_id = -1;
      g.jumps.push_back(std::move(j));
    }
  }

  // Group equal jump vectors; zero vectors keep group id -1.
  std::vector<Vec> group_reps;
  for (JumpVector& j : g.jumps) {
    if (norm2(j.vector) <= kJumpGroupingTol) continue;
    int gid = -1;
    for (std::size_t k = 0; k < group_reps.size(); ++k) {
      if (vectors_match(group_reps[k], j.vector, kJumpGroupingTol)) {
        gid = static_cast<int>(k);
        break;
      }
    }
    if (gid < 0) {
      gid = static_cast<int>(group_reps.size());
      group_reps.push_back(j.vector);
    }
    j.group_id = gid;
  }

  // Levy atoms: merged weights per nonzero group, zero-weight groups dropped.
  std::vector<double> group_weight(group_reps.size(), 0.0);
  for (const JumpVector& j : g.jumps) {
    if (j.group_id < 0) continue;
    const double rate = (j.source == 0)
                            ? (1.0 - pi) * ds.alpha0[static_cast<std::size_t>(j.symbol)]
                            : pi * ds.alpha1[static_cast<std::size_t>(j.symbol)];
    group_weight[static_cast<std::size_t>(j.group_id)] += rate;
  }
  for (std::size_t k = 0; k < group_reps.size(); ++k) {
    if (group_weight[k] <= 0.0) continue;
    LevyAtom atom;
    atom.weight = group_weight[k];
    atom.vector = group_reps[k];
    atom.group_id = static_cast<int>(k);
    g.levy_atoms.push_back(std::move(atom));
  }

  // Classes of rare-only symbols sharing a quotient point.
  g.rare_class_index.assign(udim, -1);
  std::vector<int> in_union(udim, 0);
  for (int y : ds.d0) in_union[static_cast<std::size_t>(y)] = 1;
  for (int y : ds.d1) in_union[static_cast<std::size_t>(y)] = 1;
  for (int y = 0; y < dim; ++y) {
    if (in_union[static_cast<std::size_t>(y)]) continue;
    const Vec& qp = g.quotient_points[static_cast<std::size_t>(y)];
    int cls = -1;
    for (std::size_t k = 0; k < g.rare_classes.size(); ++k) {
      const int rep = g.rare_classes[k][0];
      if (vectors_match(g.quotient_points[static_cast<std::size_t>(rep)], qp, kJumpGroupingTol)) {
        cls = static_cast<int>(k);
        break;
      }
    }
    if (cls < 0) {
      cls = static_cast<int>(g.rare_classes.size());
      g.rare_classes.emplace_back();
    }
    g.rare_classes[static_cast<std::size_t>(cls)].push_back(y);
    g.rare_class_index[static_cast<std::size_t>(y)] = cls;
  }

  return g;
}

Mat covariance_sigma(const QuotientGeometry& geometry, double pi) {
  if (!(pi >= 0.0 && pi <= 1.0))
    throw std::invalid_argument("mixing weight must lie in [0, 1]");
  return matadd(matscale(geometry.gamma0, 1.0 - pi), matscale(geometry.gamma1, pi));
}

std::complex<double> hybrid_limit_cf(const QuotientGeometry& geometry, const Vec& u, const Vec& v,
                                     bool shifted) {
  if (static_cast<int>(u.size()) != geometry.dim || static_cast<int>(v.size()) != geometry.dim)
    throw std::invalid_argument("frequency vectors must match the alphabet dimension");
  const Vec ug = matvec(geometry.proj_g, u);
  const Vec vj = matvec(geometry.proj_j, v);

  std::complex<double> log_cf(-0.5 * dot(ug, matvec(geometry.sigma, ug)), 0.0);
  for (const LevyAtom& atom : geometry.levy_atoms) {
    const double phase = dot(vj, atom.vector);
    log_cf += atom.weight * (std::complex<double>(std::cos(phase), std::sin(phase)) - 1.0);
  }
  if (shifted) log_cf += std::complex<double>(0.0, dot(vj, geometry.delta_shift));
  return std::exp(log_cf);
}

}  // namespace shufflelab
