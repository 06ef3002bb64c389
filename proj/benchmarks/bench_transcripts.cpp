#include <benchmark/benchmark.h>

#include "shufflelab/experiment.hpp"
#include "shufflelab/lab.hpp"
#include "shufflelab/transcripts.hpp"

namespace {

using namespace shufflelab;

void bm_transcript_law(benchmark::State& state) {
  const RandomizerScenario scn =
      catalog_entry("two_dominant_disjoint").scenario;
  const int n = static_cast<int>(state.range(0));
  const int k = scn.composition.k_for(n, scn.pi_limit);
  for (auto _ : state) {
    TranscriptLaw law = transcript_law(scn, n, k, 1e-12);
    benchmark::DoNotOptimize(law.law.total_mass());
  }
  state.SetComplexityN(n);
}
BENCHMARK(bm_transcript_law)->Arg(16)->Arg(32)->Arg(64)->Complexity();

void bm_privacy_curve(benchmark::State& state) {
  const RandomizerScenario scn =
      catalog_entry("two_dominant_disjoint").scenario;
  const BinaryExperiment e =
      neighboring_experiment(scn, static_cast<int>(state.range(0)), 1e-12);
  const std::vector<double> eps = {0.0, 0.25, 0.5, 1.0, 2.0};
  for (auto _ : state) {
    PrivacyCurve curve = privacy_curve(e, eps);
    benchmark::DoNotOptimize(curve.points.back().delta);
  }
}
BENCHMARK(bm_privacy_curve)->Arg(32)->Arg(64);

void bm_center_project(benchmark::State& state) {
  const RandomizerScenario scn =
      catalog_entry("two_dominant_disjoint").scenario;
  const QuotientGeometry g = scn.geometry();
  const int n = static_cast<int>(state.range(0));
  const int k = scn.composition.k_for(n, scn.pi_limit);
  const TranscriptLaw law = transcript_law(scn, n, k, 1e-12);
  for (auto _ : state) {
    DiscreteDistribution projected =
        center_project(law, g, ProjectionMode::JumpOnly, k);
    benchmark::DoNotOptimize(projected.atoms().size());
  }
}
BENCHMARK(bm_center_project)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
