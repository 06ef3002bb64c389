#include "shufflelab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shufflelab/special.hpp"

namespace shufflelab {
namespace {

constexpr double kExactZeroTol = 1e-12;

std::vector<double> as_double_grid(const std::vector<int>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (int x : xs) out.push_back(static_cast<double>(x));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

RateReport fit_or_note(const std::vector<double>& grid,
                       const std::vector<ValueWithError>& errors) {
  if (grid.size() < 3) {
    RateReport r;
    r.grid = grid;
    r.errors = errors;
    r.used.assign(grid.size(), false);
    r.note = "fit skipped: fewer than three grid points";
    return r;
  }
  return rate_fit(grid, errors);
}

}  // namespace

RateReport rate_fit(const std::vector<double>& grid,
                    const std::vector<ValueWithError>& errors) {
  if (grid.size() != errors.size())
    throw std::invalid_argument("rate_fit: grid and errors differ in length");
  if (grid.size() < 3)
    throw std::invalid_argument("rate_fit: need at least three grid points");
  RateReport r;
  r.grid = grid;
  r.errors = errors;
  r.used.assign(grid.size(), false);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
      throw std::invalid_argument("rate_fit: grid entries must be positive and finite");
    const ValueWithError& e = errors[i];
    bool usable = std::isfinite(e.value) && e.value > 0.0 &&
                  e.error_bar <= 0.1 * e.value;
    r.used[i] = usable;
    if (!usable) continue;
    ++r.used_count;
    double x = std::log(grid[i]);
    double y = std::log(e.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (r.used_count < 3) {
    r.note = "only " + std::to_string(r.used_count) +
             " usable points (need 3): values vanish or error bars exceed 10%";
    return r;
  }
  double m = static_cast<double>(r.used_count);
  double denom = sxx - sx * sx / m;
  if (denom <= 0.0) {
    r.note = "degenerate grid: zero spread among usable points";
    return r;
  }
  r.slope = (sxy - sx * sy / m) / denom;
  r.intercept = (sy - r.slope * sx) / m;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!r.used[i]) continue;
    double pred = r.intercept + r.slope * std::log(grid[i]);
    r.max_log_residual =
        std::max(r.max_log_residual, std::abs(std::log(errors[i].value) - pred));
  }
  r.fitted = true;
  return r;
}

ProjectedRateResult projected_rate_experiment(const RandomizerScenario& scenario,
                                              const std::vector<int>& n_grid,
                                              double prune,
                                              double limit_tol) {
  scenario.validate();
  QuotientGeometry g = scenario.geometry();
  BinaryExperiment limit = projected_limit_experiment(g, limit_tol);
  ProjectedRateResult out;
  out.n_grid = n_grid;
  for (int n : n_grid) {
    int k = scenario.composition.k_for(n, scenario.pi_limit);
    TranscriptLaw pn = transcript_law(scenario, n, k, prune);
    TranscriptLaw qn = transcript_law(scenario, n, k + 1, prune);
    DiscreteDistribution zp = center_project(pn, g, ProjectionMode::JumpOnly, k);
    DiscreteDistribution zq = center_project(qn, g, ProjectionMode::JumpOnly, k);
    auto aligned_null = align_by_embedding({&zp, &limit.null_law()}, kEmbeddingGroupTol);
    auto aligned_alt = align_by_embedding({&zq, &limit.alt_law()}, kEmbeddingGroupTol);
    ValueWithError en = tv_distance(aligned_null[0], aligned_null[1]);
    ValueWithError ea = tv_distance(aligned_alt[0], aligned_alt[1]);
    out.null_errors.push_back(en);
    out.alt_errors.push_back(ea);
    out.total_errors.push_back({en.value + ea.value, en.error_bar + ea.error_bar});
  }
  std::vector<double> grid = as_double_grid(n_grid);
  out.null_fit = fit_or_note(grid, out.null_errors);
  out.alt_fit = fit_or_note(grid, out.alt_errors);
  out.total_fit = fit_or_note(grid, out.total_errors);
  return out;
}

FullPrivacyResult full_privacy_convergence(const RandomizerScenario& scenario,
                                           const std::vector<int>& n_grid,
                                           const std::vector<double>& eps_grid,
                                           double prune,
                                           double limit_tol) {
  scenario.validate();
  QuotientGeometry g = scenario.geometry();
  BinaryExperiment limit = projected_limit_experiment(g, limit_tol);
  FullPrivacyResult out;
  out.n_grid = n_grid;
  out.eps_grid = eps_grid;
  std::vector<DeltaResult> limit_deltas;
  limit_deltas.reserve(eps_grid.size());
  for (double eps : eps_grid) limit_deltas.push_back(privacy_delta(limit, eps));
  std::vector<std::vector<ValueWithError>> gaps(eps_grid.size());
  for (int n : n_grid) {
    BinaryExperiment fin = neighboring_experiment(scenario, n, prune);
    for (std::size_t j = 0; j < eps_grid.size(); ++j) {
      PrivacyGapRow row;
      row.n = n;
      row.epsilon = eps_grid[j];
      row.delta_n = privacy_delta(fin, eps_grid[j]);
      row.delta_limit = limit_deltas[j];
      row.gap = {std::abs(row.delta_n.value - row.delta_limit.value),
                 row.delta_n.error_bar + row.delta_limit.error_bar};
      gaps[j].push_back(row.gap);
      out.rows.push_back(row);
    }
  }
  std::vector<double> grid = as_double_grid(n_grid);
  for (std::size_t j = 0; j < eps_grid.size(); ++j)
    out.gap_fits.push_back(fit_or_note(grid, gaps[j]));
  return out;
}

namespace {

Vec restrict_normalize(const Vec& w, const std::vector<int>& idx) {
  Vec th(idx.size());
  double total = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    th[i] = w[static_cast<std::size_t>(idx[i])];
    total += th[i];
  }
  if (!(total > 0.0))
    throw std::invalid_argument("auxiliary_experiment: dominant block has zero mass");
  for (double& x : th) x /= total;
  return th;
}

DiscreteDistribution normalize_exact(const DiscreteDistribution& law) {
  std::vector<Atom> atoms = law.atoms();
  double total = law.total_mass();
  for (Atom& a : atoms) a.mass /= total;
  return DiscreteDistribution::from_atoms(law.key_dim(), std::move(atoms), 0.0);
}

}  // namespace

AuxiliaryResult auxiliary_experiment(const RandomizerScenario& scenario, int n,
                                     double prune) {
  scenario.validate();
  QuotientGeometry g = scenario.geometry();
  if (!g.disjoint())
    throw std::invalid_argument(
        "auxiliary_experiment: requires disjoint dominant sets");
  for (const auto& cls : g.rare_classes)
    if (cls.size() != 1)
      throw std::logic_error("auxiliary_experiment: rare classes must be singletons");
  int k = scenario.composition.k_for(n, scenario.pi_limit);
  TranscriptLaw pn = transcript_law(scenario, n, k, prune);
  TranscriptLaw qn = transcript_law(scenario, n, k + 1, prune);
  DiscreteDistribution zp = center_project(pn, g, ProjectionMode::JumpOnly, k);
  DiscreteDistribution zq = center_project(qn, g, ProjectionMode::JumpOnly, k);

  RealizedRandomizer rr = realize(scenario, n);
  Vec th0 = restrict_normalize(rr.w0, g.d0);
  Vec th1 = restrict_normalize(rr.w1, g.d1);
  std::map<std::int64_t, DiscreteDistribution> cache0, cache1;
  auto conditional_row = [](std::map<std::int64_t, DiscreteDistribution>& cache,
                            const Vec& th,
                            std::int64_t total) -> const DiscreteDistribution& {
    auto it = cache.find(total);
    if (it == cache.end()) {
      DiscreteDistribution row =
          normalize_exact(multinomial_law(static_cast<int>(total), th, 0.0));
      it = cache.emplace(total, std::move(row)).first;
    }
    return it->second;
  };

  // Full-hybrid slots: dominant-union symbols in increasing order, then one
  // slot per rare class. Matches the center_project(FullHybrid) layout.
  std::vector<int> union_slot(static_cast<std::size_t>(g.dim), -1);
  int n_union = 0;
  for (int y = 0; y < g.dim; ++y)
    if (g.component_index[static_cast<std::size_t>(y)] >= 0)
      union_slot[static_cast<std::size_t>(y)] = n_union++;
  const int out_dim = n_union + static_cast<int>(g.rare_classes.size());

  const std::size_t ncomp = g.components.size();
  auto assemble = [&](const DiscreteDistribution& z) {
    DiscreteDistribution::AccumulatorMap accum;
    for (const Atom& za : z.atoms()) {
      auto totals = recover_totals(za.key, g);
      const DiscreteDistribution& r0 = conditional_row(cache0, th0, totals.first);
      const DiscreteDistribution& r1 = conditional_row(cache1, th1, totals.second);
      for (const Atom& a0 : r0.atoms()) {
        for (const Atom& a1 : r1.atoms()) {
          LatticeKey full(static_cast<std::size_t>(out_dim), 0);
          for (std::size_t i = 0; i < g.d0.size(); ++i)
            full[static_cast<std::size_t>(union_slot[static_cast<std::size_t>(g.d0[i])])] =
                a0.key[i];
          for (std::size_t i = 0; i < g.d1.size(); ++i)
            full[static_cast<std::size_t>(union_slot[static_cast<std::size_t>(g.d1[i])])] =
                a1.key[i];
          for (std::size_t r = 0; r < g.rare_classes.size(); ++r)
            full[static_cast<std::size_t>(n_union) + r] = za.key[ncomp + r];
          accum[full] += za.mass * a0.mass * a1.mass;
        }
      }
    }
    return DiscreteDistribution::from_map(out_dim, accum, 0.0, z.deficit());
  };

  DiscreteDistribution truth_null =
      center_project(pn, g, ProjectionMode::FullHybrid, k).without_embedding();
  DiscreteDistribution truth_alt =
      center_project(qn, g, ProjectionMode::FullHybrid, k).without_embedding();
  DiscreteDistribution aux_null = assemble(zp);
  DiscreteDistribution aux_alt = assemble(zq);
  ValueWithError null_tv = tv_distance(truth_null, aux_null);
  ValueWithError alt_tv = tv_distance(truth_alt, aux_alt);
  return AuxiliaryResult{pn.n,
                         k,
                         std::move(truth_null),
                         std::move(truth_alt),
                         std::move(aux_null),
                         std::move(aux_alt),
                         BinaryExperiment(std::move(zp), std::move(zq)),
                         null_tv,
                         alt_tv};
}

AuxiliarySeries auxiliary_comparison(const RandomizerScenario& scenario,
                                     const std::vector<int>& n_grid,
                                     double prune) {
  AuxiliarySeries s;
  s.n_grid = n_grid;
  for (int n : n_grid) {
    AuxiliaryResult r = auxiliary_experiment(scenario, n, prune);
    s.null_tv.push_back(r.null_tv);
    s.alt_tv.push_back(r.alt_tv);
    s.scaled_null.push_back(std::sqrt(static_cast<double>(n)) * r.null_tv.value);
  }
  auto all_zero = [](const std::vector<ValueWithError>& xs) {
    for (const ValueWithError& x : xs)
      if (x.value > kExactZeroTol) return false;
    return true;
  };
  s.null_all_zero = all_zero(s.null_tv);
  s.alt_all_zero = all_zero(s.alt_tv);
  if (s.null_all_zero) {
    s.null_fit.grid = as_double_grid(n_grid);
    s.null_fit.errors = s.null_tv;
    s.null_fit.used.assign(n_grid.size(), false);
    s.null_fit.note = "fit skipped: every distance is at or below 1e-12";
  } else {
    s.null_fit = fit_or_note(as_double_grid(n_grid), s.null_tv);
  }
  return s;
}

BinomialBernoulliReport binomial_bernoulli_check(const std::vector<int>& m_grid,
                                                 double p, double q) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("binomial_bernoulli_check: p must lie in (0,1)");
  if (!(q >= 0.0) || !(q <= 1.0))
    throw std::invalid_argument("binomial_bernoulli_check: q must lie in [0,1]");
  BinomialBernoulliReport rep;
  rep.p = p;
  rep.q = q;
  for (int m : m_grid) {
    if (m < 1)
      throw std::invalid_argument("binomial_bernoulli_check: m must be >= 1");
    std::vector<double> pmf = binomial_pmf_table(m, p);
    double peak = 0.0;
    for (double x : pmf) peak = std::max(peak, x);
    BinomialBernoulliRow row;
    row.m = m;
    row.closed_form = std::abs(q - p) * peak;
    double acc = 0.0;
    for (int kk = 0; kk <= m + 1; ++kk) {
      double base = kk <= m ? pmf[static_cast<std::size_t>(kk)] : 0.0;
      double prev = kk >= 1 ? pmf[static_cast<std::size_t>(kk - 1)] : 0.0;
      double x = base * (1.0 - q) + prev * q;
      double y = base * (1.0 - p) + prev * p;
      acc += std::abs(x - y);
    }
    row.tv = 0.5 * acc;
    row.mismatch = std::abs(row.tv - row.closed_form);
    row.scaled = std::sqrt(static_cast<double>(m)) * row.tv;
    row.asymptote = std::abs(q - p) /
                    std::sqrt(2.0 * M_PI * static_cast<double>(m) * p * (1.0 - p));
    rep.rows.push_back(row);
  }
  return rep;
}

BoundaryBeResult boundary_be_experiment(const std::vector<double>& c_grid,
                                        const std::vector<double>& eps_list,
                                        const std::vector<double>& pi_list,
                                        double coupling_tol) {
  if (c_grid.empty())
    throw std::invalid_argument("boundary_be_experiment: empty c grid");
  for (double c : c_grid)
    if (!(c > 0.0) || !(c <= 1.0))
      throw std::invalid_argument("boundary_be_experiment: c must lie in (0,1]");
  BoundaryBeResult out;
  out.c_grid = c_grid;
  for (double c : c_grid) {
    out.jitter.push_back(jitter_tv_to_gaussian(c, coupling_tol));
    out.rounding.push_back(rounding_tv_to_poisson(c, coupling_tol));
  }
  out.jitter_fit = fit_or_note(c_grid, out.jitter);
  out.rounding_fit = fit_or_note(c_grid, out.rounding);

  std::vector<BinaryExperiment> poisson;
  poisson.reserve(c_grid.size());
  for (double c : c_grid)
    poisson.push_back(poisson_shift_experiment(c, kShiftTailBudget));
  for (double eps : eps_list) {
    GapSeries s;
    s.epsilon = eps;
    s.skellam = false;
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
      DeltaResult dl = privacy_delta(poisson[i], eps);
      double dg = gaussian_shift_delta(c_grid[i], eps);
      s.lattice.push_back(dl);
      s.gauss.push_back(dg);
      s.gaps.push_back({std::abs(dl.value - dg), dl.error_bar});
      double bound = (1.0 + std::exp(eps)) *
                     (out.jitter[i].value + out.jitter[i].error_bar +
                      out.rounding[i].value + out.rounding[i].error_bar);
      s.kernel_bound.push_back(bound);
      if (s.gaps.back().value > bound + 1e-12) s.bound_ok = false;
    }
    s.fit = fit_or_note(c_grid, s.gaps);
    out.series.push_back(std::move(s));
  }
  for (double pi : pi_list) {
    if (!(pi > 0.0) || !(pi < 1.0))
      throw std::invalid_argument("boundary_be_experiment: pi must lie in (0,1)");
    std::vector<BinaryExperiment> skellam;
    skellam.reserve(c_grid.size());
    for (double c : c_grid)
      skellam.push_back(skellam_shift_experiment(c, pi, kShiftTailBudget));
    for (double eps : eps_list) {
      GapSeries s;
      s.epsilon = eps;
      s.skellam = true;
      s.pi = pi;
      for (std::size_t i = 0; i < c_grid.size(); ++i) {
        DeltaResult dl = privacy_delta(skellam[i], eps);
        double dg = gaussian_shift_delta(c_grid[i], eps);
        s.lattice.push_back(dl);
        s.gauss.push_back(dg);
        s.gaps.push_back({std::abs(dl.value - dg), dl.error_bar});
      }
      s.fit = fit_or_note(c_grid, s.gaps);
      out.series.push_back(std::move(s));
    }
  }
  return out;
}

CfExpansionReport cf_expansion_check(const RandomizerScenario& scenario,
                                     const Vec& u, const Vec& v,
                                     const std::vector<int>& n_grid) {
  scenario.validate();
  QuotientGeometry g = scenario.geometry();
  Vec ug = matvec(g.proj_g, u);
  Vec vj = matvec(g.proj_j, v);
  CfExpansionReport rep;
  rep.n_grid = n_grid;
  const std::complex<double> iu(0.0, 1.0);
  for (int n : n_grid) {
    RealizedRandomizer rr = realize(scenario, n);
    for (int b = 0; b < 2; ++b) {
      const Mat& gamma = b == 0 ? g.gamma0 : g.gamma1;
      const Vec& alpha = b == 0 ? scenario.ds.alpha0 : scenario.ds.alpha1;
      std::complex<double> lead =
          -dot(ug, matvec(gamma, ug)) / (2.0 * static_cast<double>(n));
      for (const JumpVector& jv : g.jumps) {
        if (jv.source != b) continue;
        double a = alpha[static_cast<std::size_t>(jv.symbol)];
        if (a == 0.0) continue;
        lead += a / static_cast<double>(n) *
                (std::exp(iu * dot(vj, jv.vector)) - 1.0);
      }
      std::complex<double> phi = one_user_cf(rr, g, b, u, v, n);
      double resid = static_cast<double>(n) * std::abs(std::log(phi) - lead);
      (b == 0 ? rep.residual_null : rep.residual_alt).push_back(resid);
    }
  }
  rep.monotone_decreasing = true;
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (rep.residual_null[i] >= rep.residual_null[i - 1] ||
        rep.residual_alt[i] >= rep.residual_alt[i - 1])
      rep.monotone_decreasing = false;
  }
  if (!n_grid.empty())
    rep.final_max = std::max(rep.residual_null.back(), rep.residual_alt.back());
  return rep;
}

namespace {

RandomizerScenario make_scenario(
    std::vector<std::string> symbols,
    const std::vector<std::pair<std::string, double>>& dom0,
    const std::vector<std::pair<std::string, double>>& dom1,
    const std::vector<std::pair<std::string, double>>& rare0,
    const std::vector<std::pair<std::string, double>>& rare1, double pi,
    CompositionRule composition) {
  RandomizerScenario s;
  s.alphabet = AlphabetSpec::from_symbols(std::move(symbols));
  const int size = s.alphabet.size();
  std::vector<std::pair<int, double>> idx0, idx1;
  for (const auto& [label, w] : dom0) idx0.emplace_back(s.alphabet.index_of(label), w);
  for (const auto& [label, w] : dom1) idx1.emplace_back(s.alphabet.index_of(label), w);
  std::sort(idx0.begin(), idx0.end());
  std::sort(idx1.begin(), idx1.end());
  for (const auto& [i, w] : idx0) {
    s.ds.d0.push_back(i);
    s.ds.p0.push_back(w);
  }
  for (const auto& [i, w] : idx1) {
    s.ds.d1.push_back(i);
    s.ds.p1.push_back(w);
  }
  s.ds.alpha0.assign(static_cast<std::size_t>(size), 0.0);
  s.ds.alpha1.assign(static_cast<std::size_t>(size), 0.0);
  for (const auto& [label, a] : rare0)
    s.ds.alpha0[static_cast<std::size_t>(s.alphabet.index_of(label))] = a;
  for (const auto& [label, a] : rare1)
    s.ds.alpha1[static_cast<std::size_t>(s.alphabet.index_of(label))] = a;
  s.pi_limit = pi;
  s.composition = std::move(composition);
  s.validate();
  return s;
}

}  // namespace

RandomizerScenario sharpness_scenario(double p, double q, double lambda) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("sharpness_scenario: p must lie in (0,1)");
  if (!(q >= 0.0) || !(q <= 1.0))
    throw std::invalid_argument("sharpness_scenario: q must lie in [0,1]");
  if (!(lambda > 0.0))
    throw std::invalid_argument("sharpness_scenario: lambda must be positive");
  return make_scenario(
      {"a", "b", "c", "d"}, {{"a", p}, {"b", 1.0 - p}}, {{"c", p}, {"d", 1.0 - p}},
      {}, {{"a", lambda * q}, {"b", lambda * (1.0 - q)}}, 0.5,
      CompositionRule::proportional());
}

const std::vector<ScenarioCatalogEntry>& catalog() {
  static const std::vector<ScenarioCatalogEntry> entries = [] {
    std::vector<ScenarioCatalogEntry> v;
    v.push_back(
        {"single_dominant",
         "one dominant symbol per input over a three-symbol alphabet, both "
         "rare intensities active",
         make_scenario({"y0", "y1", "y2"}, {{"y0", 1.0}}, {{"y1", 1.0}},
                       {{"y1", 1.0}, {"y2", 0.5}}, {{"y0", 0.7}}, 0.5,
                       CompositionRule::proportional()),
         {{"projected_rate",
           "projected distance to the limit decays like 1/n (fitted slope <= "
           "-0.9 over n = 8..512, all error bars below 10%)"},
          {"cf_expansion",
           "scaled one-user log-characteristic residual decreases along n = "
           "1e2, 1e3, 1e4 and ends below 1e-2"}}});
    v.push_back(
        {"two_dominant_disjoint",
         "two dominant symbols per input, disjoint supports, asymmetric "
         "conditional laws",
         make_scenario({"a", "b", "c", "d"}, {{"a", 0.6}, {"b", 0.4}},
                       {{"c", 0.3}, {"d", 0.7}}, {{"c", 0.3}}, {{"a", 0.5}}, 0.5,
                       CompositionRule::proportional()),
         {{"privacy_gap",
           "hockey-stick value at n = 256, eps = 1 sits within 0.05 of the "
           "limit value"},
          {"aux_delta_identity",
           "surrogate experiment reproduces the projected hockey-stick values "
           "at eps in {0, 0.5, 1} within 1e-9 plus truncation bars (n = 64)"},
          {"cf_expansion",
           "scaled one-user log-characteristic residual decreases along n = "
           "1e2, 1e3, 1e4 and ends below 1e-2"}}});
    v.push_back(
        {"two_dominant_overlap",
         "dominant supports share one symbol; a common rare symbol keeps the "
         "jump measure nontrivial",
         make_scenario({"a", "b", "c", "d"}, {{"a", 0.5}, {"b", 0.5}},
                       {{"b", 0.5}, {"c", 0.5}}, {{"c", 0.5}, {"d", 0.25}},
                       {{"a", 0.5}, {"d", 0.25}}, 0.5,
                       CompositionRule::proportional()),
         {{"zero_shift",
           "overlapping supports force a vanishing quotient shift (sup-norm "
           "<= 1e-12)"},
          {"full_tv_rate",
           "raw transcript distance decays with fitted slope <= -0.4 over n = "
           "16..512"},
          {"projected_null_alt_match",
           "projected null-side and alternative-side limit distances agree "
           "within 1e-10 over n = 8..256"}}});
    v.push_back(
        {"mixed_size",
         "one singleton dominant set against a two-symbol dominant set, plus "
         "an off-support rare symbol",
         make_scenario({"a", "b", "c", "d"}, {{"a", 1.0}},
                       {{"b", 0.4}, {"c", 0.6}}, {{"b", 0.6}},
                       {{"a", 0.3}, {"d", 0.2}}, 0.5,
                       CompositionRule::proportional()),
         {{"two_components",
           "quotient decomposes into exactly two dominant components with one "
           "rare class"},
          {"projected_rate",
           "projected distance to the limit decays like 1/n (fitted slope <= "
           "-0.9 over n = 8..512, all error bars below 10%)"}}});
    v.push_back(
        {"obstruction",
         "degenerate composition pinned at k = 0 with overlapping dominant "
         "supports: the limit interchange fails",
         make_scenario({"a", "b", "c"}, {{"a", 0.5}, {"b", 0.5}},
                       {{"b", 0.5}, {"c", 0.5}}, {}, {}, 0.0,
                       CompositionRule::fixed(0)),
         {{"delta_floor",
           "hockey-stick value stays at or above 1/2 - 1e-12 for n in {1, 2, "
           "5, 10, 20} and eps in {0, 0.5, 1, 2}"}}});
    v.push_back(
        {"sharpness",
         "disjoint two-symbol dominant sets with matched conditionals and a "
         "tilted rare split (p = 0.3, q = 0.8, lambda = 1)",
         sharpness_scenario(0.3, 0.8, 1.0),
         {{"sqrt_n_window",
           "sqrt(n) times the surrogate distance stays within a factor 2 "
           "window over n = 32..256"},
          {"tv_rate_window",
           "surrogate distance decays like n^{-1/2}: fitted slope within "
           "[-0.65, -0.35] over n = 32..256"}}});
    v.push_back(
        {"sharpness_compatible",
         "sharpness layout with matching rare split (q = p): the surrogate "
         "law coincides with the exact law",
         sharpness_scenario(0.3, 0.3, 1.0),
         {{"aux_exact_or_fast",
           "surrogate distances vanish identically (<= 1e-12), or decay with "
           "fitted slope <= -0.9"}}});
    return v;
  }();
  return entries;
}

const ScenarioCatalogEntry& catalog_entry(const std::string& name) {
  for (const ScenarioCatalogEntry& e : catalog())
    if (e.name == name) return e;
  throw std::invalid_argument("catalog_entry: no entry named '" + name + "'");
}

namespace {

const std::vector<int> kRateGrid{8, 16, 32, 64, 128, 256, 512};
const std::vector<int> kTvGrid{16, 32, 64, 128, 256, 512};
const std::vector<int> kWindowGrid{32, 64, 128, 256};
const std::vector<int> kCfGrid{100, 1000, 10000};
constexpr double kCheckPrune = 1e-12;
constexpr double kCheckLimitTol = 1e-10;

CheckOutcome check_projected_rate(const ScenarioCatalogEntry& entry) {
  ProjectedRateResult r =
      projected_rate_experiment(entry.scenario, kRateGrid, kCheckPrune, kCheckLimitTol);
  bool pass = r.null_fit.fitted && r.alt_fit.fitted &&
              r.null_fit.used_count == kRateGrid.size() &&
              r.alt_fit.used_count == kRateGrid.size() &&
              r.null_fit.slope <= -0.9 && r.alt_fit.slope <= -0.9;
  std::string detail = "null slope " + fmt(r.null_fit.slope) + " (" +
                       std::to_string(r.null_fit.used_count) + "/" +
                       std::to_string(kRateGrid.size()) + " points), alt slope " +
                       fmt(r.alt_fit.slope) + " (" +
                       std::to_string(r.alt_fit.used_count) + "/" +
                       std::to_string(kRateGrid.size()) + " points)";
  if (!r.null_fit.fitted) detail += "; null fit: " + r.null_fit.note;
  if (!r.alt_fit.fitted) detail += "; alt fit: " + r.alt_fit.note;
  return {"projected_rate", pass, detail};
}

CheckOutcome check_cf_expansion(const ScenarioCatalogEntry& entry) {
  const int dim = entry.scenario.alphabet.size();
  Vec u(dim), v(dim);
  if (entry.name == "single_dominant") {
    u = {0.0, 0.0, 0.0};
    v = {0.4, -0.2, -0.2};
  } else if (entry.name == "two_dominant_disjoint") {
    double s = 0.5 / std::sqrt(2.0);
    u = {s, -s, 0.0, 0.0};
    v = {0.2, 0.2, -0.2, -0.2};
  } else {
    for (int i = 0; i < dim; ++i) {
      u[static_cast<std::size_t>(i)] = 0.3 * std::cos(static_cast<double>(i + 1));
      v[static_cast<std::size_t>(i)] = 0.25 * std::sin(static_cast<double>(2 * i + 1));
    }
  }
  CfExpansionReport rep = cf_expansion_check(entry.scenario, u, v, kCfGrid);
  bool pass = rep.monotone_decreasing && rep.final_max < 1e-2;
  std::string detail =
      "residuals null [" + fmt(rep.residual_null[0]) + ", " +
      fmt(rep.residual_null[1]) + ", " + fmt(rep.residual_null[2]) + "], alt [" +
      fmt(rep.residual_alt[0]) + ", " + fmt(rep.residual_alt[1]) + ", " +
      fmt(rep.residual_alt[2]) + "], monotone " +
      (rep.monotone_decreasing ? "yes" : "no");
  return {"cf_expansion", pass, detail};
}

CheckOutcome check_privacy_gap(const ScenarioCatalogEntry& entry) {
  FullPrivacyResult r = full_privacy_convergence(entry.scenario, {256}, {1.0},
                                                 kCheckPrune, kCheckLimitTol);
  const PrivacyGapRow& row = r.rows.front();
  bool pass = row.gap.value < 0.05;
  std::string detail = "delta_n " + fmt(row.delta_n.value) + ", delta_limit " +
                       fmt(row.delta_limit.value) + ", gap " + fmt(row.gap.value) +
                       " (bar " + fmt(row.gap.error_bar) + ")";
  return {"privacy_gap", pass, detail};
}

CheckOutcome check_aux_delta_identity(const ScenarioCatalogEntry& entry) {
  AuxiliaryResult r = auxiliary_experiment(entry.scenario, 64, kCheckPrune);
  BinaryExperiment aux(r.aux_null, r.aux_alt);
  bool pass = true;
  double worst = 0.0;
  for (double eps : {0.0, 0.5, 1.0}) {
    DeltaResult da = privacy_delta(aux, eps);
    DeltaResult dp = privacy_delta(r.projected, eps);
    double diff = std::abs(da.value - dp.value);
    worst = std::max(worst, diff);
    if (diff > 1e-9 + da.error_bar + dp.error_bar) pass = false;
  }
  return {"aux_delta_identity", pass,
          "largest surrogate/projected mismatch " + fmt(worst)};
}

CheckOutcome check_zero_shift(const ScenarioCatalogEntry& entry) {
  QuotientGeometry g = entry.scenario.geometry();
  double sup = 0.0;
  for (double x : g.delta_shift) sup = std::max(sup, std::abs(x));
  return {"zero_shift", sup <= 1e-12, "sup-norm of quotient shift " + fmt(sup)};
}

CheckOutcome check_full_tv_rate(const ScenarioCatalogEntry& entry) {
  std::vector<ValueWithError> tvs;
  for (int n : kTvGrid) {
    BinaryExperiment e = neighboring_experiment(entry.scenario, n, 1e-13);
    tvs.push_back(tv_distance(e.null_law(), e.alt_law()));
  }
  RateReport fit = fit_or_note(as_double_grid(kTvGrid), tvs);
  bool pass = fit.fitted && fit.slope <= -0.4;
  std::string detail = "fitted slope " + fmt(fit.slope) + " over n = 16..512";
  if (!fit.fitted) detail = "fit failed: " + fit.note;
  return {"full_tv_rate", pass, detail};
}

CheckOutcome check_projected_null_alt_match(const ScenarioCatalogEntry& entry) {
  std::vector<int> grid{8, 16, 32, 64, 128, 256};
  ProjectedRateResult r =
      projected_rate_experiment(entry.scenario, grid, kCheckPrune, kCheckLimitTol);
  double worst = 0.0;
  bool pass = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double diff = std::abs(r.null_errors[i].value - r.alt_errors[i].value);
    worst = std::max(worst, diff);
    double allow =
        1e-10 + r.null_errors[i].error_bar + r.alt_errors[i].error_bar;
    if (diff > allow) pass = false;
  }
  return {"projected_null_alt_match", pass,
          "largest null/alt mismatch " + fmt(worst)};
}

CheckOutcome check_two_components(const ScenarioCatalogEntry& entry) {
  QuotientGeometry g = entry.scenario.geometry();
  bool pass = g.components.size() == 2 && g.rare_classes.size() == 1;
  return {"two_components",
          pass,
          std::to_string(g.components.size()) + " components, " +
              std::to_string(g.rare_classes.size()) + " rare classes"};
}

CheckOutcome check_delta_floor(const ScenarioCatalogEntry& entry) {
  double min_delta = 1.0;
  for (int n : {1, 2, 5, 10, 20}) {
    BinaryExperiment e = neighboring_experiment(entry.scenario, n, 1e-15);
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
      DeltaResult d = privacy_delta(e, eps);
      min_delta = std::min(min_delta, d.value);
    }
  }
  return {"delta_floor", min_delta >= 0.5 - 1e-12,
          "smallest hockey-stick value " + fmt(min_delta)};
}

CheckOutcome check_sqrt_n_window(const ScenarioCatalogEntry& entry) {
  AuxiliarySeries s = auxiliary_comparison(entry.scenario, kWindowGrid, 1e-14);
  double lo = s.scaled_null[0], hi = s.scaled_null[0];
  for (double x : s.scaled_null) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  bool pass = lo > 0.0 && hi <= 2.0 * lo;
  std::string detail = "sqrt(n) * distance in [" + fmt(lo) + ", " + fmt(hi) +
                       "], ratio " + fmt(lo > 0.0 ? hi / lo : 0.0);
  return {"sqrt_n_window", pass, detail};
}

CheckOutcome check_tv_rate_window(const ScenarioCatalogEntry& entry) {
  AuxiliarySeries s = auxiliary_comparison(entry.scenario, kWindowGrid, 1e-14);
  bool pass = s.null_fit.fitted && s.null_fit.slope >= -0.65 &&
              s.null_fit.slope <= -0.35;
  std::string detail = s.null_fit.fitted
                           ? "fitted slope " + fmt(s.null_fit.slope)
                           : "fit failed: " + s.null_fit.note;
  return {"tv_rate_window", pass, detail};
}

CheckOutcome check_aux_exact_or_fast(const ScenarioCatalogEntry& entry) {
  AuxiliarySeries s = auxiliary_comparison(entry.scenario, kWindowGrid, 1e-14);
  if (s.null_all_zero && s.alt_all_zero) {
    double hi = 0.0;
    for (const ValueWithError& x : s.null_tv) hi = std::max(hi, x.value);
    for (const ValueWithError& x : s.alt_tv) hi = std::max(hi, x.value);
    return {"aux_exact_or_fast", true,
            "all surrogate distances at zero (largest " + fmt(hi) + ")"};
  }
  bool pass = s.null_fit.fitted && s.null_fit.slope <= -0.9;
  std::string detail = s.null_fit.fitted
                           ? "fitted slope " + fmt(s.null_fit.slope)
                           : "fit failed: " + s.null_fit.note;
  return {"aux_exact_or_fast", pass, detail};
}

}  // namespace

CheckOutcome run_scenario_check(const ScenarioCatalogEntry& entry,
                                const std::string& check_id) {
  bool declared = false;
  for (const ScenarioCheck& c : entry.checks)
    if (c.id == check_id) declared = true;
  if (!declared)
    throw std::invalid_argument("run_scenario_check: entry '" + entry.name +
                                "' declares no check '" + check_id + "'");
  if (check_id == "projected_rate") return check_projected_rate(entry);
  if (check_id == "cf_expansion") return check_cf_expansion(entry);
  if (check_id == "privacy_gap") return check_privacy_gap(entry);
  if (check_id == "aux_delta_identity") return check_aux_delta_identity(entry);
  if (check_id == "zero_shift") return check_zero_shift(entry);
  if (check_id == "full_tv_rate") return check_full_tv_rate(entry);
  if (check_id == "projected_null_alt_match")
    return check_projected_null_alt_match(entry);
  if (check_id == "two_components") return check_two_components(entry);
  if (check_id == "delta_floor") return check_delta_floor(entry);
  if (check_id == "sqrt_n_window") return check_sqrt_n_window(entry);
  if (check_id == "tv_rate_window") return check_tv_rate_window(entry);
  if (check_id == "aux_exact_or_fast") return check_aux_exact_or_fast(entry);
  throw std::logic_error("run_scenario_check: unimplemented check '" + check_id +
                         "'");
}

std::vector<CheckOutcome> run_all_checks(const ScenarioCatalogEntry& entry) {
  std::vector<CheckOutcome> out;
  for (const ScenarioCheck& c : entry.checks)
    out.push_back(run_scenario_check(entry, c.id));
  return out;
}

}  // namespace shufflelab
