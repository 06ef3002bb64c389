#pragma once

#include <cstdint>
#include <vector>

namespace shufflelab {

// Standard normal CDF.  Absolute error below 1e-14 on [-40, 40]; clamped to
// {0, 1} outside that range.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// log of the Poisson(lambda) pmf at k (k >= 0, lambda > 0).
double poisson_log_pmf(std::int64_t k, double lambda);
double poisson_pmf(std::int64_t k, double lambda);

// Smallest K such that P(Poi(lambda) > K) <= tail.  Deterministic scan from 0.
std::int64_t poisson_upper_quantile(double lambda, double tail);

// Rigorous upper bound on P(Poisson(lambda) >= k); exact-scan free, valid for
// arbitrarily small tails (geometric domination above the mean).
double poisson_upper_tail_bound(double lambda, std::int64_t k);

// log of the Binomial(n, p) pmf at k; exact at the p in {0,1} and k edge cases.
double binomial_log_pmf(std::int64_t k, std::int64_t n, double p);
double binomial_pmf(std::int64_t k, std::int64_t n, double p);

// Full Binomial(n, p) pmf table, indices 0..n.
std::vector<double> binomial_pmf_table(std::int64_t n, double p);

}  // namespace shufflelab
