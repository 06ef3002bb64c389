#include "shufflelab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shufflelab {

CompositionRule CompositionRule::proportional() { return CompositionRule{}; }

CompositionRule CompositionRule::fixed(int k) {
  if (k < 0) throw std::invalid_argument("fixed composition requires k >= 0");
  CompositionRule rule;
  rule.kind = Kind::Fixed;
  rule.fixed_k = k;
  return rule;
}

CompositionRule CompositionRule::custom_list(std::vector<std::pair<int, int>> pairs) {
  CompositionRule rule;
  rule.kind = Kind::CustomList;
  rule.custom = std::move(pairs);
  for (const auto& [n, k] : rule.custom) {
    if (n <= 0 || k < 0 || k > n)
      throw std::invalid_argument("custom composition entries require 0 <= k <= n, n > 0");
  }
  return rule;
}

int CompositionRule::k_for(int n, double pi) const {
  if (n <= 0) throw std::invalid_argument("composition requires n > 0");
  switch (kind) {
    case Kind::Proportional: {
      long long k = std::llround(pi * static_cast<double>(n));
      k = std::max(0LL, std::min<long long>(k, n - 1));
      return static_cast<int>(k);
    }
    case Kind::Fixed:
      return fixed_k;
    case Kind::CustomList:
      for (const auto& [nn, kk] : custom) {
        if (nn == n) return kk;
      }
      throw std::invalid_argument("custom composition list has no entry for n = " +
                                  std::to_string(n));
  }
  throw std::logic_error("unreachable composition kind");
}

void RandomizerScenario::validate() const {
  const int dim = alphabet.size();
  ds.validate(dim);
  if (!(pi_limit >= 0.0 && pi_limit <= 1.0))
    throw std::invalid_argument("pi_limit must lie in [0, 1]");
  auto check_correction = [&](const Vec& c, const std::vector<int>& own, const char* name) {
    if (c.empty()) return;  // absent: treated as zero
    if (static_cast<int>(c.size()) != dim)
      throw std::invalid_argument(std::string(name) + " must have one entry per symbol");
    for (int y = 0; y < dim; ++y) {
      if (!std::isfinite(c[static_cast<std::size_t>(y)]))
        throw std::invalid_argument(std::string(name) + " entries must be finite");
      if (!std::binary_search(own.begin(), own.end(), y) &&
          c[static_cast<std::size_t>(y)] != 0.0)
        throw std::invalid_argument(std::string(name) +
                                    " must vanish off the matching dominant set");
    }
  };
  check_correction(correction0, ds.d0, "correction0");
  check_correction(correction1, ds.d1, "correction1");
  if (composition.kind == CompositionRule::Kind::Fixed && composition.fixed_k < 0)
    throw std::invalid_argument("fixed composition requires k >= 0");
}

namespace {

Vec realize_side(const AlphabetSpec& alphabet, const std::vector<int>& d,
                 const std::vector<double>& p, const std::vector<double>& alpha, const Vec& corr,
                 int n, int side) {
  const int dim = alphabet.size();
  Vec w(static_cast<std::size_t>(dim), 0.0);
  double off_mass = 0.0;
  for (int y = 0; y < dim; ++y) {
    if (std::binary_search(d.begin(), d.end(), y)) continue;
    const double value = alpha[static_cast<std::size_t>(y)] / static_cast<double>(n);
    w[static_cast<std::size_t>(y)] = value;
    off_mass += value;
  }
  if (off_mass > 1.0) {
    throw std::invalid_argument("randomizer " + std::to_string(side) + " infeasible at n = " +
                                std::to_string(n) + ": off-dominant mass " +
                                std::to_string(off_mass) + " exceeds 1");
  }
  double dom_sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t y = static_cast<std::size_t>(d[i]);
    const double c = corr.empty() ? 0.0 : corr[y];
    const double base = p[i] + c / static_cast<double>(n);
    if (base < 0.0) {
      throw std::invalid_argument("randomizer " + std::to_string(side) + " infeasible at n = " +
                                  std::to_string(n) + ": dominant entry for symbol \"" +
                                  alphabet.symbols[y] + "\" is negative (" +
                                  std::to_string(base) + ")");
    }
    w[y] = base;
    dom_sum += base;
  }
  if (dom_sum <= 0.0)
    throw std::invalid_argument("randomizer " + std::to_string(side) +
                                " infeasible: dominant block has zero mass");
  const double scale_factor = (1.0 - off_mass) / dom_sum;
  for (int y : d) w[static_cast<std::size_t>(y)] *= scale_factor;

  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

RealizedRandomizer realize(const RandomizerScenario& scenario, int n) {
  scenario.validate();
  if (n <= 0) throw std::invalid_argument("realization requires n > 0");
  RealizedRandomizer r;
  r.n = n;
  r.w0 = realize_side(scenario.alphabet, scenario.ds.d0, scenario.ds.p0, scenario.ds.alpha0,
                      scenario.correction0, n, 0);
  r.w1 = realize_side(scenario.alphabet, scenario.ds.d1, scenario.ds.p1, scenario.ds.alpha1,
                      scenario.correction1, n, 1);
  return r;
}

}  // namespace shufflelab
