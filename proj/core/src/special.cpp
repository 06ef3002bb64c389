#include "shufflelab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace shufflelab {

double normal_cdf(double x) {
  if (x < -40.0) return 0.0;
  if (x > 40.0) return 1.0;
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double poisson_log_pmf(std::int64_t k, double lambda) {
  if (k < 0) throw std::invalid_argument("poisson_log_pmf: negative count");
  if (lambda <= 0.0) throw std::invalid_argument("poisson_log_pmf: lambda must be positive");
  return -lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
}

double poisson_pmf(std::int64_t k, double lambda) { return std::exp(poisson_log_pmf(k, lambda)); }

double poisson_upper_tail_bound(double lambda, std::int64_t k) {
  if (lambda <= 0.0)
    throw std::invalid_argument("poisson_upper_tail_bound: lambda must be positive");
  if (k <= 0) return 1.0;
  const double kk = static_cast<double>(k);
  if (kk <= lambda) return 1.0;
  // Geometric domination: P(N >= k) <= pmf(k) / (1 - lambda/(k+1)).
  const double ratio = lambda / (kk + 1.0);
  const double bound = poisson_pmf(k, lambda) / (1.0 - ratio);
  // The true tail is positive for every finite k; when the computation
  // underflows, the smallest positive double is still a valid upper bound.
  if (bound <= 0.0) return std::numeric_limits<double>::denorm_min();
  return std::min(1.0, bound);
}

std::int64_t poisson_upper_quantile(double lambda, double tail) {
  if (lambda <= 0.0) throw std::invalid_argument("poisson_upper_quantile: lambda must be positive");
  if (tail <= 0.0) throw std::invalid_argument("poisson_upper_quantile: tail must be positive");
  if (tail >= 1e-12) {
    double term = std::exp(-lambda);
    double cum = term;
    std::int64_t k = 0;
    // Recurrence keeps relative accuracy near machine precision for our lambdas.
    while (1.0 - cum > tail) {
      ++k;
      term *= lambda / static_cast<double>(k);
      cum += term;
      if (k > 100000000) throw std::runtime_error("poisson_upper_quantile: quantile scan diverged");
    }
    return k;
  }
  // Below double resolution of 1 - cum: use the rigorous geometric tail bound
  // (conservative, so the realized tail never exceeds the budget).
  std::int64_t k = static_cast<std::int64_t>(std::ceil(lambda));
  while (poisson_upper_tail_bound(lambda, k + 1) > tail) {
    ++k;
    if (k > 100000000) throw std::runtime_error("poisson_upper_quantile: quantile scan diverged");
  }
  return k;
}

double binomial_log_pmf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0 || k > n) return -INFINITY;
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_log_pmf: p outside [0,1]");
  if (p == 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p == 1.0) return k == n ? 0.0 : -INFINITY;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) +
         kk * std::log(p) + (nn - kk) * std::log1p(-p);
}

double binomial_pmf(std::int64_t k, std::int64_t n, double p) {
  const double lg = binomial_log_pmf(k, n, p);
  return std::isinf(lg) ? 0.0 : std::exp(lg);
}

std::vector<double> binomial_pmf_table(std::int64_t n, double p) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = binomial_pmf(k, n, p);
  return out;
}

}  // namespace shufflelab
