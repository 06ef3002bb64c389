#include "shufflelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shufflelab {

namespace {

void require_compatible(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.key_dim() != q.key_dim())
    throw std::invalid_argument("incompatible key spaces: dimension " +
                                std::to_string(p.key_dim()) + " vs " +
                                std::to_string(q.key_dim()));
  const bool pe = p.has_embedding(), qe = q.has_embedding();
  if (pe != qe || (pe && p.embed_dim() != q.embed_dim()))
    throw std::invalid_argument("incompatible key spaces: embedding convention differs");
}

bool key_less(const LatticeKey& a, const LatticeKey& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Walks the union support of two sorted atom arrays.
template <typename Fn>
void for_union(const DiscreteDistribution& p, const DiscreteDistribution& q, Fn&& fn) {
  const auto& pa = p.atoms();
  const auto& qa = q.atoms();
  std::size_t i = 0, j = 0;
  while (i < pa.size() || j < qa.size()) {
    if (j == qa.size() || (i < pa.size() && key_less(pa[i].key, qa[j].key))) {
      fn(pa[i].mass, 0.0);
      ++i;
    } else if (i == pa.size() || key_less(qa[j].key, pa[i].key)) {
      fn(0.0, qa[j].mass);
      ++j;
    } else {
      fn(pa[i].mass, qa[j].mass);
      ++i;
      ++j;
    }
  }
}

}  // namespace

BinaryExperiment::BinaryExperiment(DiscreteDistribution null_law, DiscreteDistribution alt_law)
    : null_(std::move(null_law)), alt_(std::move(alt_law)) {
  require_compatible(null_, alt_);
}

ValueWithError tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_compatible(p, q);
  double sum = 0.0;
  for_union(p, q, [&](double mp, double mq) { sum += std::abs(mp - mq); });
  return {0.5 * sum, 0.5 * (p.deficit() + q.deficit())};
}

DeltaResult privacy_delta(const BinaryExperiment& exp, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("privacy_delta: epsilon must be nonnegative");
  const double lift = std::exp(epsilon);
  double raw = 0.0;
  for_union(exp.null_law(), exp.alt_law(), [&](double null_mass, double alt_mass) {
    const double gain = alt_mass - lift * null_mass;
    if (gain > 0.0) raw += gain;
  });
  DeltaResult out;
  out.raw = raw;
  out.value = std::clamp(raw, 0.0, 1.0);
  out.error_bar = exp.alt_law().deficit() + lift * exp.null_law().deficit();
  return out;
}

PrivacyCurve privacy_curve(const BinaryExperiment& exp, const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("privacy_curve: empty epsilon grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (eps_grid[i] < 0.0) throw std::invalid_argument("privacy_curve: negative epsilon");
    if (i > 0 && eps_grid[i] < eps_grid[i - 1])
      throw std::invalid_argument("privacy_curve: grid must be sorted");
  }
  PrivacyCurve curve;
  curve.points.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const DeltaResult d = privacy_delta(exp, eps);
    curve.points.push_back({eps, d.value, d.error_bar});
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& prev = curve.points[i - 1];
    const auto& cur = curve.points[i];
    if (cur.delta > prev.delta + prev.error_bar + cur.error_bar + 1e-12)
      throw std::logic_error("privacy_curve: delta increased along the grid");
  }
  return curve;
}

ValueWithError lecam_upper_bound(const BinaryExperiment& e1, const BinaryExperiment& e2) {
  const ValueWithError a = tv_distance(e1.null_law(), e2.null_law());
  const ValueWithError b = tv_distance(e1.alt_law(), e2.alt_law());
  return a.value >= b.value ? ValueWithError{a.value, std::max(a.error_bar, b.error_bar)}
                            : ValueWithError{b.value, std::max(a.error_bar, b.error_bar)};
}

BinaryExperiment pushforward_experiment(const BinaryExperiment& exp,
                                        const std::function<LatticeKey(const LatticeKey&)>& f,
                                        int out_dim) {
  return BinaryExperiment(pushforward(exp.null_law(), f, out_dim),
                          pushforward(exp.alt_law(), f, out_dim));
}

BinaryExperiment align_experiment_by_embedding(const DiscreteDistribution& null_law,
                                               const DiscreteDistribution& alt_law, double tol) {
  auto aligned = align_by_embedding({&null_law, &alt_law}, tol);
  return BinaryExperiment(std::move(aligned[0]), std::move(aligned[1]));
}

}  // namespace shufflelab
