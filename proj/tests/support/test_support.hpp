#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shufflelab/distribution.hpp"
#include "shufflelab/experiment.hpp"
#include "shufflelab/geometry.hpp"
#include "shufflelab/linalg.hpp"
#include "shufflelab/rng.hpp"
#include "shufflelab/scenario.hpp"

namespace shufflelab::testsupport {

// Small dense helpers the core library does not need but tests do.
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);
double max_abs(const Mat& m);

// Uniform draw in [lo, hi).
double uniform(RandomStream& rng, double lo, double hi);
// Uniform integer in [lo, hi] inclusive.
int uniform_int(RandomStream& rng, int lo, int hi);
// Vector with independent entries uniform in [-1, 1).
Vec random_vec(RandomStream& rng, std::size_t dim);
// Random permutation of 0..n-1.
std::vector<int> random_permutation(RandomStream& rng, int n);

// Normalized random law on Z^dim with distinct keys in [-span, span]^dim and
// the given deficit (atom masses sum to 1 - deficit).
DiscreteDistribution random_law(RandomStream& rng, int dim, int n_atoms,
                                int span, double deficit);

// A pair of random laws sharing part of their support (useful as a generic
// binary experiment).
BinaryExperiment random_experiment(RandomStream& rng, int dim, int n_atoms,
                                   int span);

// Valid randomized scenario: alphabet size 3..6, disjoint or overlapping
// dominant sets under a random symbol permutation, random conditionals,
// random sparse rare intensities, pi in [0.3, 0.7), mostly proportional
// composition, occasional small dominant corrections.
RandomizerScenario random_scenario(RandomStream& rng);

// Law of the histogram of n draws (n - k from w0, k from w1) built by direct
// one-draw-at-a-time convolution; an independent counterpart of the
// binomial-factorization pipeline for small n.
std::map<LatticeKey, double> brute_force_transcript(const RealizedRandomizer& rr,
                                                    int k);

}  // namespace shufflelab::testsupport
