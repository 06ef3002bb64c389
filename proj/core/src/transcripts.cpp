#include "shufflelab/transcripts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "shufflelab/special.hpp"

namespace shufflelab {

namespace {

[[noreturn]] void throw_cap(const char* stage, double size) {
  throw std::runtime_error(std::string("atom-count cap (5e7) exceeded during ") + stage +
                           ": would require about " + std::to_string(size) + " atoms");
}

}  // namespace

DiscreteDistribution multinomial_law(int m, const Vec& p, double prune) {
  if (m < 0) throw std::invalid_argument("multinomial_law requires m >= 0");
  if (p.empty()) throw std::invalid_argument("multinomial_law requires a nonempty weight vector");
  if (!(prune >= 0.0)) throw std::invalid_argument("prune must be nonnegative");
  const int dim = static_cast<int>(p.size());
  double total_p = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument("multinomial weights must be nonnegative");
    total_p += x;
  }
  if (std::abs(total_p - 1.0) > 1e-9)
    throw std::invalid_argument("multinomial weights must sum to one");

  // Tail sums for conditional binomial factors.
  Vec tail(static_cast<std::size_t>(dim) + 1, 0.0);
  for (int j = dim - 1; j >= 0; --j)
    tail[static_cast<std::size_t>(j)] =
        tail[static_cast<std::size_t>(j) + 1] + p[static_cast<std::size_t>(j)];

  struct Partial {
    LatticeKey key;
    int used;
    double mass;
  };
  std::vector<Partial> states;
  states.push_back({LatticeKey{}, 0, 1.0});
  double deficit = 0.0;

  for (int j = 0; j + 1 < dim; ++j) {
    const double t = tail[static_cast<std::size_t>(j)];
    double p_cond = (t > 0.0) ? p[static_cast<std::size_t>(j)] / t : 0.0;
    p_cond = std::min(1.0, std::max(0.0, p_cond));

    std::vector<Partial> next;
    std::map<int, std::vector<double>> pmf_cache;
    for (Partial& s : states) {
      const int m_rem = m - s.used;
      auto it = pmf_cache.find(m_rem);
      if (it == pmf_cache.end())
        it = pmf_cache.emplace(m_rem, binomial_pmf_table(m_rem, p_cond)).first;
      const std::vector<double>& pmf = it->second;
      for (int c = 0; c <= m_rem; ++c) {
        const double mass = s.mass * pmf[static_cast<std::size_t>(c)];
        if (mass <= 0.0) continue;
        if (mass < prune) {
          deficit += mass;
          continue;
        }
        Partial ns;
        ns.key = s.key;
        ns.key.push_back(c);
        ns.used = s.used + c;
        ns.mass = mass;
        next.push_back(std::move(ns));
      }
      if (static_cast<double>(next.size()) > kAtomCountCap)
        throw_cap("multinomial factorization", static_cast<double>(next.size()));
    }
    states = std::move(next);
  }

  std::vector<Atom> atoms;
  atoms.reserve(states.size());
  for (Partial& s : states) {
    s.key.push_back(m - s.used);
    atoms.push_back(Atom{std::move(s.key), s.mass});
  }
  return DiscreteDistribution::from_atoms(dim, std::move(atoms), deficit);
}

TranscriptLaw transcript_law(const RandomizerScenario& scenario, int n, int k, double prune) {
  if (k < 0 || k > n) throw std::invalid_argument("transcript_law requires 0 <= k <= n");
  const RealizedRandomizer r = realize(scenario, n);
  const DiscreteDistribution law0 = multinomial_law(n - k, r.w0, prune);
  const DiscreteDistribution law1 = multinomial_law(k, r.w1, prune);

  const double pairs =
      static_cast<double>(law0.atoms().size()) * static_cast<double>(law1.atoms().size());
  if (pairs > kAtomCountCap) throw_cap("transcript convolution", pairs);

  DiscreteDistribution::AccumulatorMap accum;
  accum.reserve(law0.atoms().size() + law1.atoms().size());
  for (const Atom& a : law0.atoms()) {
    for (const Atom& b : law1.atoms()) {
      accum[add_keys(a.key, b.key)] += a.mass * b.mass;
    }
  }
  const double carried =
      law0.deficit() + law1.deficit() - law0.deficit() * law1.deficit();
  TranscriptLaw t;
  t.law = DiscreteDistribution::from_map(scenario.alphabet.size(), accum, prune, carried);
  t.n = n;
  t.k = k;
  return t;
}

BinaryExperiment neighboring_experiment(const RandomizerScenario& scenario, int n, double prune) {
  const int k = scenario.composition.k_for(n, scenario.pi_limit);
  if (k > n - 1)
    throw std::invalid_argument("neighboring experiment requires k_n <= n - 1");
  TranscriptLaw null_law = transcript_law(scenario, n, k, prune);
  TranscriptLaw alt_law = transcript_law(scenario, n, k + 1, prune);
  return BinaryExperiment(std::move(null_law.law), std::move(alt_law.law));
}

namespace {

struct ProjectionLayout {
  int out_dim = 0;
  int embed_dim = 0;
  std::vector<int> slot_of_symbol;      // alphabet symbol -> key slot
  std::vector<Vec> slot_columns;        // per slot, embedding contribution
  Vec center;                           // subtracted from the embedded point
};

ProjectionLayout make_layout(const QuotientGeometry& g, ProjectionMode mode, int n,
                             int center_k) {
  const int dim = g.dim;
  const std::size_t udim = static_cast<std::size_t>(dim);
  const int n_comp = static_cast<int>(g.components.size());
  const int n_rare = static_cast<int>(g.rare_classes.size());

  ProjectionLayout layout;
  layout.slot_of_symbol.assign(udim, -1);

  // Centered full histogram vector: h - (n - k) mu0 - k mu1.
  Vec center_full = add(scale(g.mu0, static_cast<double>(n - center_k)),
                        scale(g.mu1, static_cast<double>(center_k)));

  if (mode == ProjectionMode::JumpOnly) {
    layout.out_dim = n_comp + n_rare;
    layout.embed_dim = dim;
    layout.slot_columns.resize(static_cast<std::size_t>(layout.out_dim));
    for (int c = 0; c < n_comp; ++c) {
      layout.slot_columns[static_cast<std::size_t>(c)] =
          g.component_atoms[static_cast<std::size_t>(c)];
      for (int y : g.components[static_cast<std::size_t>(c)])
        layout.slot_of_symbol[static_cast<std::size_t>(y)] = c;
    }
    for (int r = 0; r < n_rare; ++r) {
      const int rep = g.rare_classes[static_cast<std::size_t>(r)][0];
      layout.slot_columns[static_cast<std::size_t>(n_comp + r)] =
          g.quotient_points[static_cast<std::size_t>(rep)];
      for (int y : g.rare_classes[static_cast<std::size_t>(r)])
        layout.slot_of_symbol[static_cast<std::size_t>(y)] = n_comp + r;
    }
    layout.center = matvec(g.proj_j, center_full);
    return layout;
  }

  // FullHybrid: dominant-union symbols in increasing order, then rare classes.
  std::vector<int> union_symbols;
  for (int y = 0; y < dim; ++y) {
    if (g.component_index[static_cast<std::size_t>(y)] >= 0) union_symbols.push_back(y);
  }
  const int n_union = static_cast<int>(union_symbols.size());
  layout.out_dim = n_union + n_rare;
  layout.embed_dim = 2 * dim;
  layout.slot_columns.resize(static_cast<std::size_t>(layout.out_dim));

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  auto column_for = [&](int y) {
    Vec e(udim, 0.0);
    e[static_cast<std::size_t>(y)] = 1.0;
    const Vec gpart = matvec(g.proj_g, e);
    const Vec& jpart = g.quotient_points[static_cast<std::size_t>(y)];
    Vec col(2 * udim, 0.0);
    for (std::size_t i = 0; i < udim; ++i) {
      col[i] = gpart[i] * inv_sqrt_n;
      col[udim + i] = jpart[i];
    }
    return col;
  };
  for (int s = 0; s < n_union; ++s) {
    const int y = union_symbols[static_cast<std::size_t>(s)];
    layout.slot_of_symbol[static_cast<std::size_t>(y)] = s;
    layout.slot_columns[static_cast<std::size_t>(s)] = column_for(y);
  }
  for (int r = 0; r < n_rare; ++r) {
    const int rep = g.rare_classes[static_cast<std::size_t>(r)][0];
    layout.slot_columns[static_cast<std::size_t>(n_union + r)] = column_for(rep);
    for (int y : g.rare_classes[static_cast<std::size_t>(r)])
      layout.slot_of_symbol[static_cast<std::size_t>(y)] = n_union + r;
  }

  const Vec center_g = matvec(g.proj_g, center_full);
  const Vec center_j = matvec(g.proj_j, center_full);
  layout.center.assign(2 * udim, 0.0);
  for (std::size_t i = 0; i < udim; ++i) {
    layout.center[i] = center_g[i] * inv_sqrt_n;
    layout.center[udim + i] = center_j[i];
  }
  return layout;
}

Vec embed_key(const ProjectionLayout& layout, const LatticeKey& key) {
  Vec e = scale(layout.center, -1.0);
  for (std::size_t s = 0; s < key.size(); ++s) {
    if (key[s] == 0) continue;
    const Vec& col = layout.slot_columns[s];
    const double count = static_cast<double>(key[s]);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += count * col[i];
  }
  return e;
}

}  // namespace

DiscreteDistribution center_project(const TranscriptLaw& t, const QuotientGeometry& geometry,
                                    ProjectionMode mode, int center_k) {
  if (t.law.key_dim() != geometry.dim)
    throw std::invalid_argument("transcript law and geometry disagree on the alphabet size");
  if (center_k < 0 || center_k > t.n)
    throw std::invalid_argument("centering composition must satisfy 0 <= k <= n");

  const ProjectionLayout layout = make_layout(geometry, mode, t.n, center_k);

  DiscreteDistribution::AccumulatorMap accum;
  accum.reserve(t.law.atoms().size());
  for (const Atom& a : t.law.atoms()) {
    LatticeKey key(static_cast<std::size_t>(layout.out_dim), 0);
    for (int y = 0; y < geometry.dim; ++y) {
      const std::int64_t c = a.key[static_cast<std::size_t>(y)];
      if (c != 0) key[static_cast<std::size_t>(layout.slot_of_symbol[static_cast<std::size_t>(y)])] += c;
    }
    accum[std::move(key)] += a.mass;
  }
  DiscreteDistribution projected =
      DiscreteDistribution::from_map(layout.out_dim, accum, 0.0, t.law.deficit());
  return projected.with_embedding(layout.embed_dim,
                                  [&layout](const LatticeKey& key) { return embed_key(layout, key); });
}

std::pair<std::int64_t, std::int64_t> recover_totals(const LatticeKey& key,
                                                     const QuotientGeometry& geometry) {
  if (!geometry.disjoint())
    throw std::invalid_argument(
        "dominant totals are only quotient-measurable for disjoint two-component geometries");
  if (key.size() < 2)
    throw std::invalid_argument("projected key is too short to carry component totals");
  // Component order is by smallest member; map each dominant set to its slot.
  const int comp_d0 = geometry.component_index[static_cast<std::size_t>(geometry.d0[0])];
  const int comp_d1 = geometry.component_index[static_cast<std::size_t>(geometry.d1[0])];
  return {key[static_cast<std::size_t>(comp_d0)], key[static_cast<std::size_t>(comp_d1)]};
}

LatticeKey sample_transcript(const RandomizerScenario& scenario, int n, int k,
                             std::uint64_t seed) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_transcript requires 0 <= k <= n");
  const RealizedRandomizer r = realize(scenario, n);
  RandomStream rng(seed);
  LatticeKey histogram(static_cast<std::size_t>(scenario.alphabet.size()), 0);
  for (int i = 0; i < n - k; ++i) ++histogram[sample_categorical(r.w0, rng)];
  for (int i = 0; i < k; ++i) ++histogram[sample_categorical(r.w1, rng)];
  return histogram;
}

std::complex<double> one_user_cf(const RealizedRandomizer& realized,
                                 const QuotientGeometry& geometry, int b, const Vec& u,
                                 const Vec& v, int n) {
  if (b != 0 && b != 1) throw std::invalid_argument("side must be 0 or 1");
  if (static_cast<int>(u.size()) != geometry.dim || static_cast<int>(v.size()) != geometry.dim)
    throw std::invalid_argument("frequency vectors must match the alphabet dimension");
  const Vec& w = (b == 0) ? realized.w0 : realized.w1;
  const Vec& mu = (b == 0) ? geometry.mu0 : geometry.mu1;
  const Vec ug = matvec(geometry.proj_g, u);
  const Vec vj = matvec(geometry.proj_j, v);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  std::complex<double> cf(0.0, 0.0);
  for (int y = 0; y < geometry.dim; ++y) {
    const double mass = w[static_cast<std::size_t>(y)];
    if (mass == 0.0) continue;
    Vec centered = scale(mu, -1.0);
    centered[static_cast<std::size_t>(y)] += 1.0;
    const double phase = dot(ug, centered) * inv_sqrt_n + dot(vj, centered);
    cf += mass * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return cf;
}

std::complex<double> transcript_cf(const TranscriptLaw& t, const QuotientGeometry& geometry,
                                   const Vec& u, const Vec& v, int center_k) {
  if (t.law.key_dim() != geometry.dim)
    throw std::invalid_argument("transcript law and geometry disagree on the alphabet size");
  const Vec ug = matvec(geometry.proj_g, u);
  const Vec vj = matvec(geometry.proj_j, v);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(t.n));

  // Per-symbol phase coefficients; centering contributes a constant offset.
  const std::size_t udim = static_cast<std::size_t>(geometry.dim);
  Vec coeff(udim, 0.0);
  for (std::size_t y = 0; y < udim; ++y) {
    Vec e(udim, 0.0);
    e[y] = 1.0;
    coeff[y] = dot(ug, matvec(geometry.proj_g, e)) * inv_sqrt_n + dot(vj, e);
  }
  const Vec center = add(scale(geometry.mu0, static_cast<double>(t.n - center_k)),
                         scale(geometry.mu1, static_cast<double>(center_k)));
  const double center_phase =
      dot(ug, matvec(geometry.proj_g, center)) * inv_sqrt_n + dot(vj, center);

  std::complex<double> cf(0.0, 0.0);
  for (const Atom& a : t.law.atoms()) {
    double phase = -center_phase;
    for (std::size_t y = 0; y < udim; ++y)
      phase += static_cast<double>(a.key[y]) * coeff[y];
    cf += a.mass * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return cf;
}

}  // namespace shufflelab
