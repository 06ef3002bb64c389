#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "shufflelab/special.hpp"
#include "support/frozen_values.hpp"

using namespace shufflelab;
namespace fz = shufflelab::testsupport::frozen;

TEST_CASE("standard normal cdf at reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(-1.0) == doctest::Approx(fz::kPhiMinus1).epsilon(1e-13));
  CHECK(normal_cdf(0.5) == doctest::Approx(fz::kPhiHalf).epsilon(1e-13));
  CHECK(normal_cdf(fz::kPhi975Quantile) == doctest::Approx(0.975).epsilon(1e-13));
  CHECK(normal_cdf(2.3) == doctest::Approx(fz::kPhi2p3).epsilon(1e-13));
  CHECK(normal_cdf(-5.0) == doctest::Approx(fz::kPhiMinus5).epsilon(1e-12));
  // Symmetry and clamping.
  for (double x : {0.3, 1.7, 4.2, 11.0}) {
    CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(normal_cdf(41.0) == 1.0);
  CHECK(normal_cdf(-41.0) == 0.0);
}

TEST_CASE("standard normal density") {
  CHECK(normal_pdf(0.0) == doctest::Approx(fz::kNormalPdf0).epsilon(1e-15));
  CHECK(normal_pdf(1.3) == doctest::Approx(fz::kNormalPdf1p3).epsilon(1e-14));
  CHECK(normal_pdf(-1.3) == normal_pdf(1.3));
}

TEST_CASE("Poisson pmf values and normalization") {
  CHECK(poisson_pmf(4, 4.0) == doctest::Approx(fz::kPoissonPmf4At4).epsilon(1e-14));
  CHECK(poisson_pmf(0, 2.5) == doctest::Approx(fz::kPoissonPmf0At2p5).epsilon(1e-14));
  CHECK(poisson_pmf(17, 6.0) == doctest::Approx(fz::kPoissonPmf17At6).epsilon(1e-12));
  CHECK(std::exp(poisson_log_pmf(17, 6.0)) ==
        doctest::Approx(poisson_pmf(17, 6.0)).epsilon(1e-14));
  double total = 0.0;
  for (std::int64_t k = 0; k <= 80; ++k) total += poisson_pmf(k, 7.5);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Poisson upper quantile brackets the tail") {
  for (double lambda : {0.3, 2.0, 9.5}) {
    for (double tail : {1e-3, 1e-8, 1e-12}) {
      const std::int64_t q = poisson_upper_quantile(lambda, tail);
      double above = 1.0;
      for (std::int64_t k = 0; k <= q; ++k) above -= poisson_pmf(k, lambda);
      CHECK(above <= tail + 1e-16);
      if (q > 0) {
        double above_prev = above + poisson_pmf(q, lambda);
        CHECK(above_prev > tail);
      }
    }
  }
}

TEST_CASE("Poisson tail bound dominates the exact tail") {
  CHECK(poisson_upper_tail_bound(3.0, 10) >= fz::kPoissonTail3At10);
  CHECK(poisson_upper_tail_bound(3.0, 10) ==
        doctest::Approx(fz::kPoissonTailBound3At10).epsilon(1e-12));
  // Bound stays valid (and positive) far below double-sum resolution.
  const double deep = poisson_upper_tail_bound(0.4, 200);
  CHECK(deep > 0.0);
  CHECK(deep < 1e-300);
  for (double lambda : {0.5, 4.0}) {
    for (std::int64_t k = static_cast<std::int64_t>(2 * lambda) + 2;
         k < static_cast<std::int64_t>(2 * lambda) + 30; ++k) {
      double exact = 0.0;
      for (std::int64_t j = k; j <= k + 400; ++j) exact += poisson_pmf(j, lambda);
      CHECK(poisson_upper_tail_bound(lambda, k) >= exact * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("binomial pmf values, edges, and table consistency") {
  CHECK(binomial_pmf(2, 5, 0.3) == doctest::Approx(fz::kBinomPmf2Of5AtP3).epsilon(1e-13));
  CHECK(binomial_pmf(7, 19, 0.62) ==
        doctest::Approx(fz::kBinomPmf7Of19AtP62).epsilon(1e-12));
  CHECK(binomial_pmf(0, 6, 0.0) == 1.0);
  CHECK(binomial_pmf(3, 6, 0.0) == 0.0);
  CHECK(binomial_pmf(6, 6, 1.0) == 1.0);
  CHECK(binomial_pmf(0, 0, 0.37) == 1.0);

  const std::vector<double> table = binomial_pmf_table(23, 0.41);
  REQUIRE(table.size() == 24);
  double total = 0.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    total += table[k];
    CHECK(table[k] ==
          doctest::Approx(binomial_pmf(static_cast<std::int64_t>(k), 23, 0.41))
              .epsilon(1e-12));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}
