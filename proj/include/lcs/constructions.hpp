#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lcs/numtheory.hpp"
#include "lcs/rng.hpp"

namespace lcs {

enum class Rounding { kCeil, kFloor };

// m x p section of the circulant matrix generated by the Legendre sign
// pattern: generator[0] = 1 and generator[t] = (t | p) for 1 <= t < p.
// Entry (i, j), 0-based, equals scale * generator[(j - i) mod p], so row i+1
// is the cyclic right shift of row i. Only the generator is stored.
struct PartialCirculantMatrix {
  std::uint64_t p = 0;
  std::uint64_t rows = 0;
  double scale = 1.0;  // 1/sqrt(rows) for unit columns
  std::vector<std::int8_t> generator;

  std::uint64_t cols() const noexcept { return p; }
  double entry(std::uint64_t i, std::uint64_t j) const;
  // First new_rows rows. renormalize rescales to 1/sqrt(new_rows); otherwise
  // the original scale is kept (the raw sign section rescaled elsewhere).
  PartialCirculantMatrix restricted(std::uint64_t new_rows, bool renormalize) const;
};

// Row count ceil(p^(alpha_num/alpha_den)) or the floor variant.
// Requires 0 < alpha <= 1 so the count stays within [1, p].
std::uint64_t row_count(const PrimeModulus& p, unsigned alpha_num, unsigned alpha_den,
                        Rounding rounding = Rounding::kCeil);

PartialCirculantMatrix legendre_partial_circulant(const PrimeModulus& p, unsigned alpha_num = 3,
                                                  unsigned alpha_den = 4,
                                                  Rounding rounding = Rounding::kCeil);

// Same construction with the row count given directly, 1 <= m <= p.
PartialCirculantMatrix legendre_partial_circulant_rows(const PrimeModulus& p, std::uint64_t m);

// Dense copy, guarded by a memory budget (std::length_error when exceeded).
Eigen::MatrixXd to_dense(const PartialCirculantMatrix& mat,
                         std::size_t budget_bytes = std::size_t(1) << 29);

// Entry (i, j), 0-based, equals legendre_symbol(x + m*j + i + 1, p) / sqrt(m).
// Keeping x + m*n <= p - 1 avoids zero symbols, so columns stay unit norm.
Eigen::MatrixXd random_legendre_matrix(const PrimeModulus& p, std::uint64_t m, std::uint64_t n,
                                       std::uint64_t x);

// Polynomial-evaluation binary matrix of shape q^2 x q^(degree+1). The
// column for polynomial f (coefficients over Z_q, lexicographic with the
// constant term varying fastest) has a 1/sqrt(q) at row a*q + f(a) for each
// a in Z_q, zeros elsewhere. Columns are unit norm; two distinct columns
// share at most `degree` support rows.
Eigen::MatrixXd devore_matrix(const PrimeModulus& q, unsigned degree,
                              std::size_t budget_bytes = std::size_t(1) << 29);

// p x p^2 chirp frame: column (r, l), stored at index r*p + l, has entries
// exp(2*pi*i*(r*t^2 + l*t)/p)/sqrt(p) at row t.
Eigen::MatrixXcd chirp_matrix(const PrimeModulus& p, std::size_t budget_bytes = std::size_t(1) << 29);

// Selected chirp columns by ambient index (0-based, < p^2), for budgeted
// coherence scans where the full p x p^2 matrix would not fit in memory.
Eigen::MatrixXcd chirp_columns(const PrimeModulus& p, const std::vector<std::uint64_t>& cols);

// i.i.d. +-1/sqrt(m) entries, filled row-major from Rng(seed).
Eigen::MatrixXd bernoulli_matrix(std::uint64_t m, std::uint64_t n, std::uint64_t seed);

}  // namespace lcs
