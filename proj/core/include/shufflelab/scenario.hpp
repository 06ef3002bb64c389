#pragma once

#include <utility>
#include <vector>

#include "shufflelab/geometry.hpp"
#include "shufflelab/linalg.hpp"

namespace shufflelab {

// Rule producing the composition k_n (number of users holding input 1).
struct CompositionRule {
  enum class Kind { Proportional, Fixed, CustomList };

  Kind kind = Kind::Proportional;
  int fixed_k = 0;
  std::vector<std::pair<int, int>> custom;  // (n, k) pairs

  static CompositionRule proportional();
  static CompositionRule fixed(int k);
  static CompositionRule custom_list(std::vector<std::pair<int, int>> pairs);

  // Proportional: round(pi * n) clamped to [0, n-1].  Fixed: the constant.
  // Custom: exact lookup; missing n is an error.
  int k_for(int n, double pi) const;
};

// Full specification of a scenario: the limiting structure plus the
// finite-n realization coefficients and the composition rule.
struct RandomizerScenario {
  AlphabetSpec alphabet;
  DominantStructure ds;
  // Optional per-symbol correction coefficients applied as c_b(y)/n on the
  // dominant entries; zero off the matching dominant set.
  Vec correction0, correction1;
  double pi_limit = 0.5;
  CompositionRule composition;

  void validate() const;
  QuotientGeometry geometry() const { return build_geometry(alphabet, ds, pi_limit); }
};

// One realized pair of local randomizers at a specific n.
struct RealizedRandomizer {
  int n = 0;
  Vec w0, w1;  // probability vectors over the alphabet
};

// Default realization: off the dominant set W_b(y) = alpha_b(y)/n; on it
// W_b(y) = (p_b(y) + c_b(y)/n) * (1 - A_{b,n}) / sum_{D_b}(p_b + c_b/n) with
// A_{b,n} the total off-dominant mass; renormalized so each sum is one.
// Rejects n for which any entry would be negative, naming the entry.
RealizedRandomizer realize(const RandomizerScenario& scenario, int n);

}  // namespace shufflelab
