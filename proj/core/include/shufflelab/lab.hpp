#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shufflelab/distribution.hpp"
#include "shufflelab/experiment.hpp"
#include "shufflelab/geometry.hpp"
#include "shufflelab/limits.hpp"
#include "shufflelab/linalg.hpp"
#include "shufflelab/scenario.hpp"
#include "shufflelab/transcripts.hpp"

namespace shufflelab {

// Tail budget used for the lattice shift experiments inside
// boundary_be_experiment. It sits far below the smallest representable
// divergence gap on the default c-grid, so truncation error bars stay well
// under 10% of the fitted values even when those values reach ~1e-79.
inline constexpr double kShiftTailBudget = 1e-90;

// Least-squares power-law fit on log-log scale. A grid point participates
// only when its value is positive and its error bar is at most 10% of the
// value; fewer than three usable points is reported as a failed fit (with a
// note), never as a fabricated slope.
struct RateReport {
  std::vector<double> grid;
  std::vector<ValueWithError> errors;
  std::vector<bool> used;
  std::size_t used_count = 0;
  bool fitted = false;
  double slope = 0.0;
  double intercept = 0.0;
  double max_log_residual = 0.0;
  std::string note;
};

RateReport rate_fit(const std::vector<double>& grid,
                    const std::vector<ValueWithError>& errors);

// Distance between each finite-n projected experiment and its limit
// experiment, after grouping atoms with equal embedded positions.
struct ProjectedRateResult {
  std::vector<int> n_grid;
  std::vector<ValueWithError> null_errors;
  std::vector<ValueWithError> alt_errors;
  std::vector<ValueWithError> total_errors;  // null + alt, bars added
  RateReport null_fit;
  RateReport alt_fit;
  RateReport total_fit;
};

ProjectedRateResult projected_rate_experiment(const RandomizerScenario& scenario,
                                              const std::vector<int>& n_grid,
                                              double prune,
                                              double limit_tol);

// Hockey-stick curves of the exact finite-n experiment against the limit
// experiment, with one convergence fit per epsilon.
struct PrivacyGapRow {
  int n = 0;
  double epsilon = 0.0;
  DeltaResult delta_n;
  DeltaResult delta_limit;
  ValueWithError gap;  // |delta_n - delta_limit|, bars added
};

struct FullPrivacyResult {
  std::vector<int> n_grid;
  std::vector<double> eps_grid;
  std::vector<PrivacyGapRow> rows;  // n-major, epsilon-minor
  std::vector<RateReport> gap_fits;  // one per epsilon
};

FullPrivacyResult full_privacy_convergence(const RandomizerScenario& scenario,
                                           const std::vector<int>& n_grid,
                                           const std::vector<double>& eps_grid,
                                           double prune,
                                           double limit_tol);

// Surrogate experiment that resamples the within-component dominant splits
// from their conditional law given the projected data. Requires disjoint
// dominant sets and singleton rare classes. Both the exact laws and the
// surrogate laws are assembled on the full-hybrid key layout (dominant-union
// symbol counts in increasing symbol order, then rare-class counts), so they
// share keys atom by atom; conditional rows are normalized exactly so the
// projected marginals agree to rounding error.
struct AuxiliaryResult {
  int n = 0;
  int k = 0;                       // null composition; alt uses k + 1
  DiscreteDistribution truth_null;  // exact law on full-hybrid keys
  DiscreteDistribution truth_alt;
  DiscreteDistribution aux_null;  // surrogate on the same keys
  DiscreteDistribution aux_alt;
  BinaryExperiment projected;  // jump-only projection with embeddings
  ValueWithError null_tv;      // TV(truth_null, aux_null)
  ValueWithError alt_tv;       // TV(truth_alt, aux_alt)
};

AuxiliaryResult auxiliary_experiment(const RandomizerScenario& scenario, int n,
                                     double prune);

struct AuxiliarySeries {
  std::vector<int> n_grid;
  std::vector<ValueWithError> null_tv;
  std::vector<ValueWithError> alt_tv;
  std::vector<double> scaled_null;  // sqrt(n) * null_tv value
  bool null_all_zero = false;       // every TV below 1e-12
  bool alt_all_zero = false;
  RateReport null_fit;
};

AuxiliarySeries auxiliary_comparison(const RandomizerScenario& scenario,
                                     const std::vector<int>& n_grid,
                                     double prune);

// Exact total variation between Binomial(m,p)+Bernoulli(q) and
// Binomial(m,p)+Bernoulli(p), its closed form |q-p| * max_k pmf(k), and the
// 1/sqrt(m) asymptote |q-p| / sqrt(2 pi m p (1-p)).
struct BinomialBernoulliRow {
  int m = 0;
  double tv = 0.0;
  double closed_form = 0.0;
  double mismatch = 0.0;  // |tv - closed_form|
  double scaled = 0.0;    // sqrt(m) * tv
  double asymptote = 0.0;
};

struct BinomialBernoulliReport {
  double p = 0.0;
  double q = 0.0;
  std::vector<BinomialBernoulliRow> rows;
};

BinomialBernoulliReport binomial_bernoulli_check(const std::vector<int>& m_grid,
                                                 double p, double q);

// Boundary behaviour of the lattice shift experiments against the Gaussian
// shift experiment: coupling distances (jitter, rounding) with their O(c)
// fits, and per-epsilon divergence gaps with their fits. The Poisson series
// also checks the pointwise kernel bound
//   |delta_lattice - delta_gauss| <= (1+e^eps) * (jitter + rounding).
struct GapSeries {
  double epsilon = 0.0;
  bool skellam = false;
  double pi = 0.0;  // only meaningful for the Skellam family
  std::vector<DeltaResult> lattice;
  std::vector<double> gauss;
  std::vector<ValueWithError> gaps;
  std::vector<double> kernel_bound;  // Poisson family only, else empty
  bool bound_ok = true;
  RateReport fit;
};

struct BoundaryBeResult {
  std::vector<double> c_grid;
  std::vector<ValueWithError> jitter;
  std::vector<ValueWithError> rounding;
  RateReport jitter_fit;
  RateReport rounding_fit;
  std::vector<GapSeries> series;
};

BoundaryBeResult boundary_be_experiment(const std::vector<double>& c_grid,
                                        const std::vector<double>& eps_list,
                                        const std::vector<double>& pi_list,
                                        double coupling_tol);

// Second-order characteristic-function expansion residual of the one-user
// law: n * |log phi_{b,n}(u,v) - leading terms|, which must decrease in n.
struct CfExpansionReport {
  std::vector<int> n_grid;
  std::vector<double> residual_null;
  std::vector<double> residual_alt;
  bool monotone_decreasing = false;
  double final_max = 0.0;
};

CfExpansionReport cf_expansion_check(const RandomizerScenario& scenario,
                                     const Vec& u, const Vec& v,
                                     const std::vector<int>& n_grid);

// Named scenario collection with machine-checkable claims attached to each
// entry. run_scenario_check executes one claim by id and reports the
// measured quantities in `detail`.
struct ScenarioCheck {
  std::string id;
  std::string description;
};

struct ScenarioCatalogEntry {
  std::string name;
  std::string summary;
  RandomizerScenario scenario;
  std::vector<ScenarioCheck> checks;
};

const std::vector<ScenarioCatalogEntry>& catalog();
const ScenarioCatalogEntry& catalog_entry(const std::string& name);

RandomizerScenario sharpness_scenario(double p, double q, double lambda);

struct CheckOutcome {
  std::string id;
  bool passed = false;
  std::string detail;
};

CheckOutcome run_scenario_check(const ScenarioCatalogEntry& entry,
                                const std::string& check_id);
std::vector<CheckOutcome> run_all_checks(const ScenarioCatalogEntry& entry);

}  // namespace shufflelab
