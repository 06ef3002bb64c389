// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Every tolerance and time budget is pinned here as a named constant.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shufflelab/lab.hpp"
#include "support/property_checks.hpp"
#include "support/test_support.hpp"

using namespace shufflelab;
namespace ts = shufflelab::testsupport;

namespace {

constexpr double kProjectorSumTol = 1e-12;
constexpr double kProjectorPropTol = 1e-10;
constexpr double kCollapseTol = 1e-10;
constexpr double kShiftMatchTol = 1e-10;
constexpr double kClosedFormMismatchTol = 1e-12;
constexpr double kAsymptoteRelTol = 0.01;
constexpr double kDeltaFloor = 0.5 - 1e-12;
constexpr double kProjectedSlopeMax = -0.9;
constexpr double kWindowFactor = 2.0;
constexpr double kWindowSlopeLo = -0.65;
constexpr double kWindowSlopeHi = -0.35;
constexpr double kCouplingSlopeMin = 0.9;
constexpr double kGapSlopeMin = 0.9;
constexpr double kCfResidualMax = 1e-2;
constexpr double kPrune = 1e-12;
constexpr double kLimitTol = 1e-10;
constexpr double kWindowPrune = 1e-14;
constexpr double kObstructionPrune = 1e-15;
constexpr std::uint64_t kPropertySeed = 0x20260815ULL;
constexpr int kPropertyTrials = 1000;

const std::vector<int> kRateGrid{8, 16, 32, 64, 128, 256, 512};
const std::vector<int> kWindowGrid{32, 64, 128, 256};
const std::vector<int> kCfGrid{100, 1000, 10000};
const std::vector<double> kBoundaryCGrid{0.4, 0.2, 0.1, 0.05};

double max_abs_vec(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string check_geometry_identities() {
  std::ostringstream why;
  for (const ScenarioCatalogEntry& entry : catalog()) {
    const QuotientGeometry g = entry.scenario.geometry();
    const std::size_t dim = static_cast<std::size_t>(g.dim);
    if (max_abs_diff(matadd(g.proj_g, g.proj_j), Mat::identity(dim)) >
        kProjectorSumTol)
      return "projector sum differs from the identity for " + entry.name;
    for (const Mat* p : {&g.proj_g, &g.proj_j}) {
      if (max_abs_diff(ts::matmul(*p, *p), *p) > kProjectorPropTol)
        return "projector is not idempotent for " + entry.name;
      if (max_abs_diff(*p, ts::transpose(*p)) > kProjectorPropTol)
        return "projector is not symmetric for " + entry.name;
    }
    for (int side = 0; side < 2; ++side) {
      const std::vector<int>& dom = side == 0 ? g.d0 : g.d1;
      const Vec& mu = side == 0 ? g.mu0 : g.mu1;
      for (int y : dom) {
        Vec v(dim, 0.0);
        v[static_cast<std::size_t>(y)] = 1.0;
        v = sub(v, mu);
        if (max_abs_vec(matvec(g.proj_j, v)) > kCollapseTol)
          return "quotient projector does not collapse the dominant tangent "
                 "space for " +
                 entry.name;
      }
    }
    const Vec direct = matvec(g.proj_j, sub(g.mu1, g.mu0));
    const int c0 = g.component_index[static_cast<std::size_t>(g.d0.front())];
    const int c1 = g.component_index[static_cast<std::size_t>(g.d1.front())];
    const Vec via_atoms = sub(g.component_atoms[static_cast<std::size_t>(c1)],
                              g.component_atoms[static_cast<std::size_t>(c0)]);
    if (max_abs_vec(sub(direct, via_atoms)) > kShiftMatchTol)
      return "the two shift formulas disagree for " + entry.name;
    if (max_abs_vec(sub(g.delta_shift, direct)) > kShiftMatchTol)
      return "stored shift differs from the projected mean gap for " +
             entry.name;
  }
  return "";
}

std::string check_binomial_closed_form() {
  const std::vector<double> levels{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<int> ms;
  for (int m = 1; m <= 200; ++m) ms.push_back(m);
  for (double p : levels)
    for (double q : levels) {
      const BinomialBernoulliReport rep = binomial_bernoulli_check(ms, p, q);
      for (const BinomialBernoulliRow& row : rep.rows)
        if (row.mismatch > kClosedFormMismatchTol) {
          std::ostringstream why;
          why << "mismatch " << row.mismatch << " at m = " << row.m
              << ", p = " << p << ", q = " << q;
          return why.str();
        }
    }
  const BinomialBernoulliReport large = binomial_bernoulli_check({10000}, 0.3, 0.8);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double target = 0.5 / std::sqrt(kTwoPi * 0.3 * 0.7);
  const double scaled = large.rows.front().scaled;
  if (std::abs(scaled - target) > kAsymptoteRelTol * target) {
    std::ostringstream why;
    why << "scaled distance " << scaled << " misses the asymptote " << target;
    return why.str();
  }
  return "";
}

std::string check_divergence_floor() {
  const RandomizerScenario& scn = catalog_entry("obstruction").scenario;
  for (int n : {1, 2, 5, 10, 20}) {
    const BinaryExperiment e = neighboring_experiment(scn, n, kObstructionPrune);
    for (double eps : {0.0, 0.5, 1.0, 2.0}) {
      const DeltaResult d = privacy_delta(e, eps);
      if (d.value < kDeltaFloor) {
        std::ostringstream why;
        why << "delta = " << d.value << " at n = " << n << ", eps = " << eps;
        return why.str();
      }
    }
  }
  return "";
}

std::string check_projected_rate() {
  const ProjectedRateResult r = projected_rate_experiment(
      catalog_entry("single_dominant").scenario, kRateGrid, kPrune, kLimitTol);
  for (const RateReport* fit : {&r.null_fit, &r.alt_fit}) {
    if (!fit->fitted) return "fit failed: " + fit->note;
    if (fit->used_count != kRateGrid.size()) {
      std::ostringstream why;
      why << "only " << fit->used_count << " of " << kRateGrid.size()
          << " grid points usable";
      return why.str();
    }
    if (fit->slope > kProjectedSlopeMax) {
      std::ostringstream why;
      why << "slope " << fit->slope << " above " << kProjectedSlopeMax;
      return why.str();
    }
  }
  return "";
}

std::string check_window() {
  const AuxiliarySeries s = auxiliary_comparison(
      catalog_entry("sharpness").scenario, kWindowGrid, kWindowPrune);
  double lo = 1e300, hi = 0.0;
  for (double v : s.scaled_null) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0) || hi > kWindowFactor * lo) {
    std::ostringstream why;
    why << "scaled distances span [" << lo << ", " << hi
        << "], beyond a factor " << kWindowFactor;
    return why.str();
  }
  if (!s.null_fit.fitted) return "fit failed: " + s.null_fit.note;
  if (s.null_fit.slope < kWindowSlopeLo || s.null_fit.slope > kWindowSlopeHi) {
    std::ostringstream why;
    why << "slope " << s.null_fit.slope << " outside [" << kWindowSlopeLo
        << ", " << kWindowSlopeHi << "]";
    return why.str();
  }
  return "";
}

std::string check_compatible_surrogate() {
  const AuxiliarySeries s = auxiliary_comparison(
      catalog_entry("sharpness_compatible").scenario, kWindowGrid, kWindowPrune);
  if (s.null_all_zero && s.alt_all_zero) return "";
  if (s.null_fit.fitted && s.null_fit.slope <= kProjectedSlopeMax) return "";
  std::ostringstream why;
  why << "distances neither vanish nor decay fast (fitted = "
      << (s.null_fit.fitted ? "yes" : "no") << ", slope = " << s.null_fit.slope
      << ")";
  return why.str();
}

std::optional<BoundaryBeResult> g_boundary;

const BoundaryBeResult& boundary() {
  if (!g_boundary)
    g_boundary = boundary_be_experiment(kBoundaryCGrid, {1.0}, {0.5},
                                        kShiftTailBudget);
  return *g_boundary;
}

std::string check_couplings() {
  const BoundaryBeResult& res = boundary();
  for (std::size_t i = 0; i < kBoundaryCGrid.size(); ++i) {
    if (res.jitter[i].value > 2.0 * kBoundaryCGrid[i] ||
        res.rounding[i].value > 2.0 * kBoundaryCGrid[i]) {
      std::ostringstream why;
      why << "coupling distance exceeds 2c at c = " << kBoundaryCGrid[i];
      return why.str();
    }
  }
  for (const RateReport* fit : {&res.jitter_fit, &res.rounding_fit}) {
    if (!fit->fitted) return "coupling fit failed: " + fit->note;
    if (fit->slope < kCouplingSlopeMin) {
      std::ostringstream why;
      why << "coupling slope " << fit->slope << " below " << kCouplingSlopeMin;
      return why.str();
    }
  }
  return "";
}

std::string check_divergence_gaps() {
  const BoundaryBeResult& res = boundary();
  for (const GapSeries& s : res.series) {
    const char* label = s.skellam ? "centered-difference" : "unit-shift";
    if (!s.fit.fitted)
      return std::string(label) + " gap fit failed: " + s.fit.note;
    if (s.fit.slope < kGapSlopeMin) {
      std::ostringstream why;
      why << label << " gap slope " << s.fit.slope << " below " << kGapSlopeMin;
      return why.str();
    }
    if (!s.skellam && !s.bound_ok)
      return "pointwise kernel bound violated on the unit-shift family";
  }
  return "";
}

std::string check_cf_expansion() {
  struct Case {
    const char* name;
    Vec u, v;
  };
  const double sdir = 0.5 / std::sqrt(2.0);
  const std::vector<Case> cases{
      {"single_dominant", Vec{0.0, 0.0, 0.0}, Vec{0.4, -0.2, -0.2}},
      {"two_dominant_disjoint", Vec{sdir, -sdir, 0.0, 0.0},
       Vec{0.2, 0.2, -0.2, -0.2}},
  };
  for (const Case& c : cases) {
    const CfExpansionReport rep = cf_expansion_check(
        catalog_entry(c.name).scenario, c.u, c.v, kCfGrid);
    if (!rep.monotone_decreasing)
      return std::string("scaled residual is not decreasing for ") + c.name;
    if (rep.final_max >= kCfResidualMax) {
      std::ostringstream why;
      why << "final residual " << rep.final_max << " for " << c.name;
      return why.str();
    }
  }
  return "";
}

std::string check_randomized_properties() {
  for (const ts::PropertyReport& r :
       ts::run_named_properties(kPropertySeed, kPropertyTrials))
    if (!r.passed())
      return r.name + ": " + std::to_string(r.failures) + " violations (" +
             r.first_failure + ")";
  return "";
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;
  std::function<std::string()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "quotient projector identities across the scenario catalog", 1.0,
       check_geometry_identities},
      {2, "binomial-plus-Bernoulli closed form and asymptote", 10.0,
       check_binomial_closed_form},
      {3, "divergence floor for the pinned-composition scenario", 5.0,
       check_divergence_floor},
      {4, "projected distances decay like 1/n", 120.0, check_projected_rate},
      {5, "sqrt(n)-scaled surrogate window and slope", 600.0, check_window},
      {6, "compatible surrogate vanishes or decays fast", 600.0,
       check_compatible_surrogate},
      {7, "lattice-to-Gaussian couplings are O(c)", 60.0, check_couplings},
      {8, "divergence gaps vanish polynomially in c", 120.0,
       check_divergence_gaps},
      {9, "one-user characteristic expansion residuals", 1.0,
       check_cf_expansion},
      {10, "randomized invariant families report no violations", 120.0,
       check_randomized_properties},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream timing;
    timing.setf(std::ios::fixed);
    timing.precision(2);
    timing << elapsed << "s";
    if (why.empty() && elapsed > c.budget_seconds) {
      std::ostringstream over;
      over << "exceeded the " << c.budget_seconds << "s budget";
      why = over.str();
    }
    if (why.empty()) {
      std::cout << "[PASS] criterion " << c.id << ": " << c.label << " ("
                << timing.str() << ")\n";
    } else {
      ++failures;
      std::cout << "[FAIL] criterion " << c.id << ": " << c.label << " ("
                << timing.str() << ") -- " << why << "\n";
    }
    std::cout.flush();
  }
  if (failures == 0) {
    std::cout << "all criteria passed\n";
    return 0;
  }
  std::cout << failures << " criteria failed\n";
  return 1;
}
