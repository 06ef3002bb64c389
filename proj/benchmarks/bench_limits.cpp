#include <benchmark/benchmark.h>

#include "shufflelab/lab.hpp"
#include "shufflelab/limits.hpp"

namespace {

using namespace shufflelab;

void bm_compound_poisson(benchmark::State& state) {
  const QuotientGeometry g =
      catalog_entry("two_dominant_disjoint").scenario.geometry();
  const LevyAtomSet set = LevyAtomSet::from_geometry(g);
  const double tol = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    DiscreteDistribution law = compound_poisson_law(set, tol);
    benchmark::DoNotOptimize(law.atoms().size());
  }
}
BENCHMARK(bm_compound_poisson)
    ->Arg(1000000)
    ->Arg(1000000000)
    ->Arg(1000000000000);

void bm_projected_limit(benchmark::State& state) {
  const QuotientGeometry g =
      catalog_entry("two_dominant_disjoint").scenario.geometry();
  for (auto _ : state) {
    BinaryExperiment e = projected_limit_experiment(g, 1e-12);
    benchmark::DoNotOptimize(e.null_law().atoms().size());
  }
}
BENCHMARK(bm_projected_limit);

void bm_skellam_shift(benchmark::State& state) {
  const double c = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    BinaryExperiment e = skellam_shift_experiment(c, 0.5, 1e-30);
    benchmark::DoNotOptimize(privacy_delta(e, 1.0).value);
  }
}
BENCHMARK(bm_skellam_shift)->Arg(5)->Arg(10)->Arg(20);

}  // namespace
