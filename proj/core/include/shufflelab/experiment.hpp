#pragma once

#include <functional>
#include <vector>

#include "shufflelab/distribution.hpp"

namespace shufflelab {

struct ValueWithError {
  double value = 0.0;
  double error_bar = 0.0;
};

struct DeltaResult {
  double value = 0.0;  // clamped to [0,1]
  double raw = 0.0;    // unclamped sum (can dip below 0 by rounding)
  double error_bar = 0.0;
};

// A pair (null, alternative) of laws on one key space.
class BinaryExperiment {
 public:
  BinaryExperiment(DiscreteDistribution null_law, DiscreteDistribution alt_law);

  const DiscreteDistribution& null_law() const { return null_; }
  const DiscreteDistribution& alt_law() const { return alt_; }

 private:
  DiscreteDistribution null_;
  DiscreteDistribution alt_;
};

struct PrivacyCurvePoint {
  double epsilon;
  double delta;
  double error_bar;
};

struct PrivacyCurve {
  std::vector<PrivacyCurvePoint> points;
};

// 1/2 sum over the union support of |p - q|, with error bar
// (deficit_p + deficit_q) / 2.  Requires structurally compatible key spaces.
ValueWithError tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Hockey-stick divergence sum_k max(alt(k) - e^eps null(k), 0); value clamped
// to [0,1]; error bar alt.deficit + e^eps * null.deficit.
DeltaResult privacy_delta(const BinaryExperiment& exp, double epsilon);

// Pointwise privacy_delta over a sorted nonnegative grid; monotonicity of
// delta in epsilon is verified (beyond error bars) as a post-check.
PrivacyCurve privacy_curve(const BinaryExperiment& exp, const std::vector<double>& eps_grid);

// max(TV(null1, null2), TV(alt1, alt2)) — one-space Le Cam upper bound.
ValueWithError lecam_upper_bound(const BinaryExperiment& e1, const BinaryExperiment& e2);

// Apply one key map to both laws.
BinaryExperiment pushforward_experiment(const BinaryExperiment& exp,
                                        const std::function<LatticeKey(const LatticeKey&)>& f,
                                        int out_dim);

// Align the two laws of an embedded experiment onto a shared embedded key
// space (see align_by_embedding).
BinaryExperiment align_experiment_by_embedding(const DiscreteDistribution& null_law,
                                               const DiscreteDistribution& alt_law, double tol);

}  // namespace shufflelab
