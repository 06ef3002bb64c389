#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "shufflelab/distribution.hpp"
#include "shufflelab/experiment.hpp"
#include "shufflelab/geometry.hpp"
#include "shufflelab/rng.hpp"
#include "shufflelab/scenario.hpp"

namespace shufflelab {

// Hard cap on intermediate atom / pair counts in exact convolutions.
inline constexpr double kAtomCountCap = 5e7;

// Exact law of the released histogram for n users, k of them holding input 1.
struct TranscriptLaw {
  DiscreteDistribution law;  // keys over Z^alphabet, every key sums to n
  int n = 0;
  int k = 0;
  double deficit() const { return law.deficit(); }
};

enum class ProjectionMode {
  JumpOnly,    // quotient statistic: component totals + rare fiber counts
  FullHybrid,  // adds per-symbol dominant counts; embedding carries both blocks
};

// Exact law of the sum of m independent categorical draws, built by
// symbol-major binomial factorization.  Masses below prune (relative to total)
// are moved into the deficit after each stage.
DiscreteDistribution multinomial_law(int m, const Vec& p, double prune);

// Exact convolution of the two group multinomials.  Throws when intermediate
// sizes exceed the atom-count cap.
TranscriptLaw transcript_law(const RandomizerScenario& scenario, int n, int k, double prune);

// (T_{n,k_n}, T_{n,k_n+1}) on the shared key space.
BinaryExperiment neighboring_experiment(const RandomizerScenario& scenario, int n, double prune);

// Center the histogram at (n-center_k) mu0 + center_k mu1 and push onto the
// quotient key space.  JumpOnly keys: one count per hypergraph component
// followed by one per rare class; embedding = projected centered histogram.
// FullHybrid keys: one count per dominant-union symbol followed by one per
// rare class; embedding = (scaled dominant block, projected block).
// The same centering composition must be used for both laws of an experiment.
DiscreteDistribution center_project(const TranscriptLaw& t, const QuotientGeometry& geometry,
                                    ProjectionMode mode, int center_k);

// Dominant totals (N(D0), N(D1)) carried by a JumpOnly key.  Only valid for
// disjoint two-component geometries; rejected otherwise.
std::pair<std::int64_t, std::int64_t> recover_totals(const LatticeKey& key,
                                                     const QuotientGeometry& geometry);

// One exact draw from T_{n,k}; reproducible from the seed.
LatticeKey sample_transcript(const RandomizerScenario& scenario, int n, int k,
                             std::uint64_t seed);

// Exact one-user characteristic value
//   phi_{b,n}(u,v) = sum_y W_b(y) exp(i<u, Pi_G(e_y - mu_b)>/sqrt(n)
//                                     + i<v, Pi_J(e_y - mu_b)>).
// u and v are projected onto their respective subspaces before use.
std::complex<double> one_user_cf(const RealizedRandomizer& realized,
                                 const QuotientGeometry& geometry, int b, const Vec& u,
                                 const Vec& v, int n);

// Characteristic value of the centered/scaled transcript statistic at (u, v),
// centered with composition center_k; equals phi_0^{n-k} phi_1^k when
// center_k = t.k, up to the deficit.
std::complex<double> transcript_cf(const TranscriptLaw& t, const QuotientGeometry& geometry,
                                   const Vec& u, const Vec& v, int center_k);

}  // namespace shufflelab
