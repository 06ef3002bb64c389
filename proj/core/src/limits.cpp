#include "shufflelab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shufflelab/special.hpp"

namespace shufflelab {

double LevyAtomSet::total_weight() const {
  double w = 0.0;
  for (const LevyAtom& a : atoms) w += a.weight;
  return w;
}

LevyAtomSet LevyAtomSet::from_geometry(const QuotientGeometry& geometry) {
  LevyAtomSet set;
  set.atoms = geometry.levy_atoms;
  set.space_dim = geometry.dim;
  return set;
}

DiscreteDistribution compound_poisson_law(const LevyAtomSet& atoms, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("compound_poisson_law requires tol > 0");
  const int m = static_cast<int>(atoms.atoms.size());
  for (const LevyAtom& a : atoms.atoms) {
    if (!(a.weight > 0.0))
      throw std::invalid_argument("compound_poisson_law requires positive atom weights");
    if (static_cast<int>(a.vector.size()) != atoms.space_dim)
      throw std::invalid_argument("jump vector dimension mismatch");
  }

  const std::size_t sdim = static_cast<std::size_t>(atoms.space_dim);
  auto embed = [&](const LatticeKey& key) {
    Vec e(sdim, 0.0);
    for (int i = 0; i < m; ++i) {
      const double c = static_cast<double>(key[static_cast<std::size_t>(i)]);
      if (c == 0.0) continue;
      const Vec& z = atoms.atoms[static_cast<std::size_t>(i)].vector;
      for (std::size_t d = 0; d < sdim; ++d) e[d] += c * z[d];
    }
    return e;
  };

  if (m == 0) {
    DiscreteDistribution point = DiscreteDistribution::point_mass(LatticeKey{});
    return point.with_embedding(atoms.space_dim, embed);
  }

  const double budget = tol / static_cast<double>(m);
  std::vector<std::vector<double>> pmfs(static_cast<std::size_t>(m));
  double tail_bound = 0.0;
  for (int i = 0; i < m; ++i) {
    const double w = atoms.atoms[static_cast<std::size_t>(i)].weight;
    const std::int64_t cap = poisson_upper_quantile(w, budget);
    std::vector<double>& pmf = pmfs[static_cast<std::size_t>(i)];
    pmf.resize(static_cast<std::size_t>(cap) + 1);
    double term = std::exp(-w);
    pmf[0] = term;
    for (std::int64_t k = 1; k <= cap; ++k) {
      term *= w / static_cast<double>(k);
      pmf[static_cast<std::size_t>(k)] = term;
    }
    tail_bound += poisson_upper_tail_bound(w, cap + 1);
  }

  std::vector<Atom> out;
  LatticeKey key(static_cast<std::size_t>(m), 0);
  // Depth-first product enumeration in lexicographic key order.
  std::vector<double> prefix_mass(static_cast<std::size_t>(m) + 1, 1.0);
  int depth = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  while (depth >= 0) {
    if (depth == m) {
      out.push_back(Atom{key, prefix_mass[static_cast<std::size_t>(m)]});
      --depth;
      continue;
    }
    std::size_t& i = idx[static_cast<std::size_t>(depth)];
    const std::vector<double>& pmf = pmfs[static_cast<std::size_t>(depth)];
    if (i >= pmf.size()) {
      i = 0;
      --depth;
      continue;
    }
    key[static_cast<std::size_t>(depth)] = static_cast<std::int64_t>(i);
    prefix_mass[static_cast<std::size_t>(depth) + 1] =
        prefix_mass[static_cast<std::size_t>(depth)] * pmf[i];
    ++i;
    ++depth;
    if (depth < m) {
      // descend with child index reset
      idx[static_cast<std::size_t>(depth)] = 0;
    }
  }

  // The enumeration covers every index combination of the truncated marginals,
  // so the unrepresented mass is exactly the product-tail, bounded by tail_bound.
  DiscreteDistribution law = DiscreteDistribution::from_atoms(m, std::move(out), tail_bound);
  return law.with_embedding(atoms.space_dim, embed);
}

BinaryExperiment projected_limit_experiment(const QuotientGeometry& geometry, double tol) {
  const LevyAtomSet atoms = LevyAtomSet::from_geometry(geometry);
  DiscreteDistribution null_law = compound_poisson_law(atoms, tol);
  DiscreteDistribution alt_law =
      translate(null_law, LatticeKey(static_cast<std::size_t>(null_law.key_dim()), 0),
                &geometry.delta_shift);
  std::vector<DiscreteDistribution> aligned =
      align_by_embedding({&null_law, &alt_law}, kEmbeddingGroupTol);
  return BinaryExperiment(std::move(aligned[0]), std::move(aligned[1]));
}

namespace {

struct TruncatedPoisson {
  std::vector<double> pmf;  // 0..cap
  double tail_bound = 0.0;  // rigorous bound on the truncated mass
};

TruncatedPoisson truncated_poisson(double lambda, double tol) {
  TruncatedPoisson tp;
  const std::int64_t cap = poisson_upper_quantile(lambda, tol);
  tp.pmf.resize(static_cast<std::size_t>(cap) + 1);
  double term = std::exp(-lambda);
  tp.pmf[0] = term;
  for (std::int64_t k = 1; k <= cap; ++k) {
    term *= lambda / static_cast<double>(k);
    tp.pmf[static_cast<std::size_t>(k)] = term;
  }
  tp.tail_bound = poisson_upper_tail_bound(lambda, cap + 1);
  return tp;
}

}  // namespace

BinaryExperiment poisson_shift_experiment(double c, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("poisson_shift_experiment requires c > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("poisson_shift_experiment requires tol > 0");
  const double lambda = 1.0 / (c * c);
  const TruncatedPoisson tp = truncated_poisson(lambda, tol);

  std::vector<Atom> atoms;
  atoms.reserve(tp.pmf.size());
  for (std::size_t k = 0; k < tp.pmf.size(); ++k)
    atoms.push_back(Atom{LatticeKey{static_cast<std::int64_t>(k)}, tp.pmf[k]});
  DiscreteDistribution null_law = DiscreteDistribution::from_atoms(1, atoms, tp.tail_bound);
  DiscreteDistribution alt_law = translate(null_law, LatticeKey{1});
  return BinaryExperiment(std::move(null_law), std::move(alt_law));
}

BinaryExperiment skellam_shift_experiment(double c, double pi, double tol) {
  if (!(c > 0.0)) throw std::invalid_argument("skellam_shift_experiment requires c > 0");
  if (!(pi > 0.0 && pi < 1.0))
    throw std::invalid_argument("skellam_shift_experiment requires pi in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("skellam_shift_experiment requires tol > 0");
  const double inv_c2 = 1.0 / (c * c);
  const TruncatedPoisson tu = truncated_poisson((1.0 - pi) * inv_c2, 0.5 * tol);
  const TruncatedPoisson tv = truncated_poisson(pi * inv_c2, 0.5 * tol);

  DiscreteDistribution::AccumulatorMap accum;
  for (std::size_t u = 0; u < tu.pmf.size(); ++u) {
    for (std::size_t v = 0; v < tv.pmf.size(); ++v) {
      accum[LatticeKey{static_cast<std::int64_t>(u) - static_cast<std::int64_t>(v)}] +=
          tu.pmf[u] * tv.pmf[v];
    }
  }
  DiscreteDistribution base =
      DiscreteDistribution::from_map(1, accum, 0.0, tu.tail_bound + tv.tail_bound);

  const double offset = (1.0 - 2.0 * pi) * inv_c2;
  DiscreteDistribution null_law = base.with_embedding(1, [&](const LatticeKey& key) {
    return Vec{c * (static_cast<double>(key[0]) - offset)};
  });
  const Vec shift{c};
  DiscreteDistribution alt_law = translate(null_law, LatticeKey{1}, &shift);
  return BinaryExperiment(std::move(null_law), std::move(alt_law));
}

double gaussian_shift_delta(double c, double epsilon) {
  if (!(c > 0.0)) throw std::invalid_argument("gaussian_shift_delta requires c > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("gaussian_shift_delta requires epsilon >= 0");
  const double value =
      normal_cdf(-epsilon / c + 0.5 * c) - std::exp(epsilon) * normal_cdf(-epsilon / c - 0.5 * c);
  return std::max(0.0, value);
}

namespace {

// Adaptive composite-midpoint integral of |f - phi| over [a, b].
template <typename F>
double adaptive_abs_integral(F&& integrand, double a, double b, double cell_tol) {
  const double len = b - a;
  int n = 8;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a + (static_cast<double>(i) + 0.5) * len / n;
    prev += integrand(x);
  }
  prev *= len / n;
  for (int iter = 0; iter < 22; ++iter) {
    n *= 2;
    double cur = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = a + (static_cast<double>(i) + 0.5) * len / n;
      cur += integrand(x);
    }
    cur *= len / n;
    if (std::abs(cur - prev) < cell_tol) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

ValueWithError jitter_tv_to_gaussian(double c, double tol) {
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("jitter_tv_to_gaussian requires c in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("jitter_tv_to_gaussian requires tol > 0");
  const double lambda = 1.0 / (c * c);
  const double tail_budget = std::min(tol * 1e-4, 1e-12);
  const TruncatedPoisson tp = truncated_poisson(lambda, tail_budget);
  const std::size_t cells = tp.pmf.size();

  double sum = 0.0;
  const double cell_tol = tol / static_cast<double>(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    const double z = c * (static_cast<double>(k) - lambda);
    const double a = z - 0.5 * c;
    const double b = z + 0.5 * c;
    const double density = tp.pmf[k] / c;
    sum += adaptive_abs_integral(
        [&](double x) { return std::abs(density - normal_pdf(x)); }, a, b, cell_tol);
  }
  const double left_edge = c * (0.0 - lambda) - 0.5 * c;
  const double right_edge = c * (static_cast<double>(cells - 1) - lambda) + 0.5 * c;
  const double gauss_outside = normal_cdf(left_edge) + (1.0 - normal_cdf(right_edge));
  const double value = 0.5 * (sum + gauss_outside + tp.tail_bound);
  return ValueWithError{std::min(1.0, value), tol + tp.tail_bound};
}

ValueWithError rounding_tv_to_poisson(double c, double tol) {
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("rounding_tv_to_poisson requires c in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("rounding_tv_to_poisson requires tol > 0");
  const double lambda = 1.0 / (c * c);
  const double tail_budget = std::min(tol * 1e-4, 1e-12);
  const TruncatedPoisson tp = truncated_poisson(lambda, tail_budget);
  const std::size_t cells = tp.pmf.size();

  double sum = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double z = c * (static_cast<double>(k) - lambda);
    const double gauss_mass = normal_cdf(z + 0.5 * c) - normal_cdf(z - 0.5 * c);
    sum += std::abs(gauss_mass - tp.pmf[k]);
  }
  const double left_edge = c * (0.0 - lambda) - 0.5 * c;
  const double right_edge = c * (static_cast<double>(cells - 1) - lambda) + 0.5 * c;
  const double gauss_outside = normal_cdf(left_edge) + (1.0 - normal_cdf(right_edge));
  const double value = 0.5 * (sum + gauss_outside + tp.tail_bound);
  const double bar = tp.tail_bound + static_cast<double>(cells + 2) * 1e-15;
  return ValueWithError{std::min(1.0, value), bar};
}

std::complex<double> embedded_cf(const DiscreteDistribution& law, const Vec& v) {
  if (!law.has_embedding())
    throw std::invalid_argument("embedded_cf requires an embedded law");
  if (static_cast<int>(v.size()) != law.embed_dim())
    throw std::invalid_argument("frequency dimension must match the embedding dimension");
  std::complex<double> cf(0.0, 0.0);
  const std::vector<double>& data = law.embedding_data();
  const std::size_t ed = static_cast<std::size_t>(law.embed_dim());
  for (std::size_t i = 0; i < law.atoms().size(); ++i) {
    double phase = 0.0;
    for (std::size_t d = 0; d < ed; ++d) phase += v[d] * data[i * ed + d];
    cf += law.atoms()[i].mass * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return cf;
}

}  // namespace shufflelab
