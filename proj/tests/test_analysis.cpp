#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lcs/analysis.hpp"
#include "lcs/constructions.hpp"
#include "lcs/reference.hpp"
#include "support/oracles.hpp"

using namespace lcs;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("dense coherence: orthonormal columns give zero, known pair gives its value") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(6, 6);
  CHECK(coherence(eye).mu == 0.0);

  Eigen::MatrixXd m(2, 2);
  m << 1.0, 1.0 / std::sqrt(2.0),
       0.0, 1.0 / std::sqrt(2.0);
  const CoherenceReport rep = coherence(m);
  CHECK(rep.mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(rep.argmax_a == 1);
  CHECK(rep.argmax_b == 2);

  // non-unit columns are normalized before the scan
  Eigen::MatrixXd scaled = m;
  scaled.col(0) *= 7.0;
  scaled.col(1) *= 0.01;
  CHECK(coherence(scaled).mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sliding-window coherence agrees with the serial and dense routes") {
  const PrimeModulus p(23);
  const PartialCirculantMatrix mat = legendre_partial_circulant(p);

  const CoherenceReport fast = coherence(mat);
  const CoherenceReport slow = reference::coherence(mat);
  const CoherenceReport dense = coherence(to_dense(mat));

  CHECK(fast.mu == doctest::Approx(slow.mu).epsilon(1e-14));
  CHECK(fast.mu == doctest::Approx(dense.mu).epsilon(1e-12));
  CHECK(fast.argmax_a == slow.argmax_a);
  CHECK(fast.argmax_b == slow.argmax_b);
  CHECK(fast.argmax_a >= 1);
  CHECK(fast.argmax_a < fast.argmax_b);
  CHECK(fast.argmax_b <= 23);

  // frozen: max |window sum| is 7 over 11 rows, first attained at (2, 12)
  CHECK(fast.mu == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
  CHECK(fast.argmax_a == 2);
  CHECK(fast.argmax_b == 12);
}

TEST_CASE("coherence matches the serial reference for a spread of primes") {
  for (std::uint64_t q : {31ull, 67ull, 101ull, 173ull}) {
    const PartialCirculantMatrix mat = legendre_partial_circulant(PrimeModulus(q));
    const CoherenceReport fast = coherence(mat);
    const CoherenceReport slow = reference::coherence(mat);
    CHECK(fast.mu == doctest::Approx(slow.mu).epsilon(1e-14));
    CHECK(fast.argmax_a == slow.argmax_a);
    CHECK(fast.argmax_b == slow.argmax_b);
  }
}

TEST_CASE("frozen coherence values at the working sizes") {
  const CoherenceReport r71 = coherence(legendre_partial_circulant(PrimeModulus(71)));
  CHECK(r71.m == 25);
  CHECK(r71.mu == doctest::Approx(17.0 / 25.0).epsilon(1e-15));
  CHECK(r71.argmax_a == 41);
  CHECK(r71.argmax_b == 56);

  const CoherenceReport r997 = coherence(legendre_partial_circulant(PrimeModulus(997)));
  CHECK(r997.m == 178);
  CHECK(r997.mu == doctest::Approx(56.0 / 178.0).epsilon(1e-15));
  CHECK(r997.argmax_a == 343);
  CHECK(r997.argmax_b == 830);
  CHECK(r997.bound == doctest::Approx(3.686340709038177).epsilon(1e-12));
}

TEST_CASE("logarithmic bound values and the coherence guarantee over a sweep") {
  CHECK(coherence_bound(PrimeModulus(71)) == doctest::Approx(4.4054409697562882).epsilon(1e-12));
  CHECK(coherence_bound(PrimeModulus(997)) == doctest::Approx(3.686340709038177).epsilon(1e-12));

  // mu <= min(1, bound) for every prime in a mid-size window; the acceptance
  // gate extends this to 1193
  for (std::uint64_t q : primes_in_range(23, 499)) {
    const PrimeModulus p(q);
    const CoherenceReport rep = coherence(legendre_partial_circulant(p));
    const double cap = std::min(1.0, coherence_bound(p));
    CHECK(rep.mu <= cap);
    CHECK(rep.bound == doctest::Approx(coherence_bound(p)).epsilon(1e-14));
  }
}

TEST_CASE("budgeted dense scan marks itself approximate") {
  const Eigen::MatrixXd dense = to_dense(legendre_partial_circulant(PrimeModulus(101)));
  const CoherenceReport full = coherence(dense);
  const CoherenceReport cut = coherence(dense, 40);
  CHECK_FALSE(full.approximate);
  CHECK(cut.approximate);
  CHECK(cut.mu <= full.mu + 1e-15);
}

TEST_CASE("isometry proxies from coherence") {
  CHECK(rip_from_coherence(5, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rip_from_coherence_gershgorin(5, 0.1) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("guaranteed sparsity budgets are honest about desk scale") {
  const SparsityBudget b997 = max_sparsity(PrimeModulus(997), 3, 4);
  CHECK(b997.guaranteed == 0);  // the full constant needs astronomically large p
  CHECK(b997.scale_only == 0);
  // the constant-free form turns positive once p^(1/4) outgrows 3 ln p
  const SparsityBudget big = max_sparsity(PrimeModulus(15485863), 3, 4);
  CHECK(big.scale_only >= 1);
  CHECK(big.guaranteed == 0);
}

TEST_CASE("chirp coherence hits the closed form with and without a budget") {
  for (std::uint64_t q : {5ull, 7ull, 11ull, 13ull}) {
    const CoherenceReport rep = chirp_coherence(PrimeModulus(q));
    CHECK(std::abs(rep.mu - 1.0 / std::sqrt(static_cast<double>(q))) <= 1e-10);
    CHECK(rep.bound == doctest::Approx(1.0 / std::sqrt(static_cast<double>(q))).epsilon(1e-14));
    CHECK_FALSE(rep.approximate);
  }
  // a budgeted scan still sees two distinct quadratic coefficients
  const CoherenceReport cut = chirp_coherence(PrimeModulus(13), 20);
  CHECK(std::abs(cut.mu - 1.0 / std::sqrt(13.0)) <= 1e-10);
  CHECK(cut.approximate);
}

TEST_CASE("complex dense coherence agrees with the chirp closed form") {
  const CoherenceReport rep = coherence(chirp_matrix(PrimeModulus(5)));
  CHECK(std::abs(rep.mu - 1.0 / std::sqrt(5.0)) <= 1e-12);
}

TEST_CASE("character sums over quadratics: complete sums collapse to -1") {
  for (std::uint64_t q : {11ull, 31ull, 101ull}) {
    const PrimeModulus p(q);
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(q); ++a)
      for (std::int64_t b = a + 1; b < static_cast<std::int64_t>(q); ++b) {
        // f(x) = (x + a)(x + b), distinct roots
        const WeylSumRecord rec =
            incomplete_weyl_sum({a * b, a + b, 1}, p, q - 1);
        CHECK(rec.value == -1);
        CHECK(std::abs(static_cast<double>(rec.value)) <
              2.0 * std::sqrt(static_cast<double>(q)));
      }
  }
  // a repeated root makes the sum p - 1
  const WeylSumRecord sq = incomplete_weyl_sum({4, 4, 1}, PrimeModulus(31), 30);
  CHECK(sq.value == 30);
}

TEST_CASE("incomplete character sums respect the logarithmic budget") {
  for (std::uint64_t q : {31ull, 101ull}) {
    const PrimeModulus p(q);
    const double budget =
        2.0 * (1.0 + std::log(static_cast<double>(q))) * std::sqrt(static_cast<double>(q));
    for (std::uint64_t n = 0; n < q; n += 3) {
      const WeylSumRecord rec = incomplete_weyl_sum({3, 5, 1}, p, n);
      CHECK(std::abs(static_cast<double>(rec.value)) <= budget);
      CHECK(rec.bound == doctest::Approx(budget).epsilon(1e-12));
      CHECK(rec.terms == n);
    }
  }
}

TEST_CASE("character sum rejects non-monic polynomials and out-of-range endpoints") {
  const PrimeModulus p(31);
  CHECK_THROWS_AS(incomplete_weyl_sum({1, 2, 2}, p, 10), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_weyl_sum({}, p, 10), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_weyl_sum({3, 5, 1}, p, 31), std::invalid_argument);
}

TEST_CASE("section isometry probe is internally consistent") {
  const PrimeModulus p(997);
  CHECK(p1_default_rows(p) == 75);  // ceil(997^(5/8))
  CHECK(p1_default_sparsity(p) == 1);

  const PartialCirculantMatrix mat = legendre_partial_circulant(p);
  const std::uint64_t ell = p1_default_rows(p);
  const std::uint64_t k = p1_default_sparsity(p);
  const SectionIsometryReport rep = p1_check(mat, k, ell);
  CHECK(rep.ell == ell);
  CHECK(rep.k == k);
  CHECK(rep.mu == doctest::Approx(coherence(mat.restricted(ell, true)).mu).epsilon(1e-15));
  CHECK(rep.delta_2k == doctest::Approx(2.0 * static_cast<double>(k) * rep.mu).epsilon(1e-15));
  CHECK(rep.satisfied == (rep.delta_2k < 1.0 / 9.0));

  CHECK_THROWS_AS(p1_check(mat, 0, ell), std::invalid_argument);
  CHECK_THROWS_AS(p1_check(mat, 1, mat.rows + 1), std::invalid_argument);
}

TEST_CASE("report rows serialize in the documented column order") {
  CHECK(std::string(CoherenceReport::csv_header()) == "p,m,mu,bound,argmax_a,argmax_b");
  CoherenceReport rep;
  rep.p = 23;
  rep.m = 11;
  rep.mu = 0.5;
  rep.bound = 2.0;
  rep.argmax_a = 2;
  rep.argmax_b = 12;
  CHECK(rep.csv_row() == "23,11,0.5,2,2,12");
}

TEST_SUITE_END();
