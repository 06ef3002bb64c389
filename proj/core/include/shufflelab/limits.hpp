#pragma once

#include <complex>
#include <vector>

#include "shufflelab/distribution.hpp"
#include "shufflelab/experiment.hpp"
#include "shufflelab/geometry.hpp"

namespace shufflelab {

// Tolerance at which embedded points are identified across laws.
inline constexpr double kEmbeddingGroupTol = 1e-9;

// Finite atomic jump measure on the quotient space.
struct LevyAtomSet {
  std::vector<LevyAtom> atoms;  // weights > 0, vectors pairwise distinct
  int space_dim = 0;            // dimension of the jump vectors

  double total_weight() const;
  static LevyAtomSet from_geometry(const QuotientGeometry& geometry);
};

// Exact law of the compound-Poisson count field: keys are per-atom counts,
// truncated per coordinate at Poisson quantiles so the total deficit stays
// within tol (budget split equally across atoms); embedding = sum counts * z.
DiscreteDistribution compound_poisson_law(const LevyAtomSet& atoms, double tol);

// (L(J), L(J + Delta)) identified on a shared key space by grouping embedded
// points at kEmbeddingGroupTol.  Genuinely distinct points falling inside the
// tolerance raise an error rather than being merged silently.
BinaryExperiment projected_limit_experiment(const QuotientGeometry& geometry, double tol);

// (Poi(1/c^2), 1 + Poi(1/c^2)) on integer keys, truncated to deficit <= tol.
BinaryExperiment poisson_shift_experiment(double c, double tol);

// Centered scaled difference of independent Poissons:
// null = law of c(U - V - (1-2 pi)/c^2), U ~ Poi((1-pi)/c^2), V ~ Poi(pi/c^2);
// alt shifts the first coordinate by one unit (a +c shift of the value).
// Keys are the integer lattice index; the embedding carries the real value.
BinaryExperiment skellam_shift_experiment(double c, double pi, double tol);

// Closed-form hockey-stick of (N(0,1), N(c,1)):
// Phi(-eps/c + c/2) - e^eps Phi(-eps/c - c/2).
double gaussian_shift_delta(double c, double epsilon);

// TV between the uniform-jitter smoothing of the centered scaled Poisson
// lattice law and N(0,1).  Cell integrals use adaptive midpoint subdivision
// (>= 8 intervals, doubled until the change is below tol per cell share);
// truncated Poisson tail mass goes into the error bar.
ValueWithError jitter_tv_to_gaussian(double c, double tol);

// TV between N(0,1) rounded to the lattice cells and the lattice law itself;
// Gaussian cell masses via CDF differences.
ValueWithError rounding_tv_to_poisson(double c, double tol);

// Characteristic value sum_i mass_i * exp(i <v, embedded_i>) of an embedded law.
std::complex<double> embedded_cf(const DiscreteDistribution& law, const Vec& v);

}  // namespace shufflelab
