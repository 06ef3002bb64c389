#pragma once

#include <complex>
#include <string>
#include <vector>

#include "shufflelab/linalg.hpp"

namespace shufflelab {

struct AlphabetSpec {
  std::vector<std::string> symbols;

  static AlphabetSpec from_symbols(std::vector<std::string> symbols);
  int size() const { return static_cast<int>(symbols.size()); }
  int index_of(const std::string& label) const;  // throws if absent
};

// Dominant sets with their limiting conditional laws and rare intensities.
struct DominantStructure {
  std::vector<int> d0, d1;             // sorted symbol indices, nonempty
  std::vector<double> p0, p1;          // aligned with d0/d1; entries > 0, sum 1
  std::vector<double> alpha0, alpha1;  // per symbol (full length); zero on own dominant set

  void validate(int alphabet_size) const;
};

struct JumpVector {
  int source;      // 0 or 1
  int symbol;      // index in the alphabet
  Vec vector;      // projection of e_y - mu_source onto the quotient space
  int group_id;    // shared by equal vectors; -1 for (dropped) zero vectors
};

struct LevyAtom {
  double weight;  // > 0
  Vec vector;     // != 0
  int group_id;
};

// The dominant-tangent quotient geometry and every derived limit ingredient.
struct QuotientGeometry {
  int dim = 0;
  double pi = 0.0;
  std::vector<int> d0, d1;  // copies of the dominant sets
  Mat proj_g;               // orthogonal projector onto the dominant tangent space
  Mat proj_j;               // complementary projector (quotient space)
  std::vector<std::vector<int>> components;  // partition of D0 ∪ D1, sorted
  std::vector<Vec> component_atoms;          // constant quotient point per component
  std::vector<int> component_index;          // symbol -> component (-1 off the union)
  Vec mu0, mu1;                              // dominant means (full-length vectors)
  Vec m0, m1;                                // quotient points of mu0, mu1
  Vec delta_shift;                           // quotient shift between alternatives
  Mat gamma0, gamma1;                        // single-draw dominant covariances
  Mat sigma;                                 // (1-pi) gamma0 + pi gamma1
  std::vector<JumpVector> jumps;             // all (b, y not in D_b)
  std::vector<LevyAtom> levy_atoms;          // grouped, zero weight/vector dropped
  std::vector<Vec> quotient_points;          // proj_j e_y per symbol
  // Symbols outside D0 ∪ D1 grouped by equal quotient point.
  std::vector<std::vector<int>> rare_classes;
  std::vector<int> rare_class_index;  // symbol -> class (-1 for dominant-union symbols)

  bool disjoint() const { return components.size() == 2; }
};

// Connected components of the hypergraph on D0 ∪ D1 with hyperedges D0, D1:
// a single component when the sets overlap, otherwise {D0, D1}.  Output sorted
// by smallest member.
std::vector<std::vector<int>> components(const std::vector<int>& d0, const std::vector<int>& d1);

// Grouping tolerance for equal projected vectors.
inline constexpr double kJumpGroupingTol = 1e-9;

QuotientGeometry build_geometry(const AlphabetSpec& alphabet, const DominantStructure& ds,
                                double pi);

// (1 - pi) gamma0 + pi gamma1 for an explicit mixing weight.
Mat covariance_sigma(const QuotientGeometry& geometry, double pi);

// Characteristic function of the limiting hybrid pair at frequency (u, v):
// exp(-<u, sigma u>/2 + sum_atoms w (e^{i<v,z>} - 1)), with an extra factor
// e^{i<v,delta>} for the shifted (alternative) law.  u and v are projected
// onto their respective subspaces before use.
std::complex<double> hybrid_limit_cf(const QuotientGeometry& geometry, const Vec& u, const Vec& v,
                                     bool shifted);

}  // namespace shufflelab
