#include "lcs/constructions.hpp"

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace lcs {

double PartialCirculantMatrix::entry(std::uint64_t i, std::uint64_t j) const {
  if (i >= rows || j >= p) throw std::out_of_range("PartialCirculantMatrix::entry: index");
  const std::uint64_t t = (j + p - i) % p;
  assert(t != 0 || i == j);  // off-diagonal indices never wrap onto the diagonal rule
  return scale * static_cast<double>(generator[t]);
}

PartialCirculantMatrix PartialCirculantMatrix::restricted(std::uint64_t new_rows,
                                                          bool renormalize) const {
  if (new_rows < 1 || new_rows > rows)
    throw std::invalid_argument("restricted: row count outside [1, rows]");
  PartialCirculantMatrix out = *this;
  out.rows = new_rows;
  if (renormalize) out.scale = 1.0 / std::sqrt(static_cast<double>(new_rows));
  return out;
}

std::uint64_t row_count(const PrimeModulus& p, unsigned alpha_num, unsigned alpha_den,
                        Rounding rounding) {
  if (alpha_num == 0 || alpha_den == 0 || alpha_num > alpha_den)
    throw std::invalid_argument("row_count: alpha must lie in (0, 1]");
  const std::uint64_t m = rounding == Rounding::kCeil
                              ? ceil_pow_frac(p.value(), alpha_num, alpha_den)
                              : floor_pow_frac(p.value(), alpha_num, alpha_den);
  return m < 1 ? 1 : m;
}

PartialCirculantMatrix legendre_partial_circulant(const PrimeModulus& p, unsigned alpha_num,
                                                  unsigned alpha_den, Rounding rounding) {
  return legendre_partial_circulant_rows(p, row_count(p, alpha_num, alpha_den, rounding));
}

PartialCirculantMatrix legendre_partial_circulant_rows(const PrimeModulus& p, std::uint64_t m) {
  const std::uint64_t q = p.value();
  if (m < 1 || m > q)
    throw std::invalid_argument("legendre_partial_circulant_rows: m outside [1, p]");
  PartialCirculantMatrix mat;
  mat.p = q;
  mat.rows = m;
  mat.scale = 1.0 / std::sqrt(static_cast<double>(m));
  mat.generator.resize(q);
  mat.generator[0] = 1;  // the defining formula pins diagonal entries to +1
  for (std::uint64_t t = 1; t < q; ++t)
    mat.generator[t] = static_cast<std::int8_t>(legendre_symbol(static_cast<std::int64_t>(t), p));
  return mat;
}

namespace {

void check_budget(std::uint64_t rows, std::uint64_t cols, std::size_t elem_bytes,
                  std::size_t budget_bytes, const char* who) {
  const unsigned __int128 need = static_cast<unsigned __int128>(rows) * cols * elem_bytes;
  if (need > budget_bytes) throw std::length_error(std::string(who) + ": memory budget exceeded");
}

}  // namespace

Eigen::MatrixXd to_dense(const PartialCirculantMatrix& mat, std::size_t budget_bytes) {
  check_budget(mat.rows, mat.p, sizeof(double), budget_bytes, "to_dense");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(mat.rows), static_cast<Eigen::Index>(mat.p));
  for (std::uint64_t i = 0; i < mat.rows; ++i) {
    // Row i is the generator cyclically shifted right by i.
    for (std::uint64_t j = 0; j < mat.p; ++j) {
      const std::uint64_t t = (j + mat.p - i) % mat.p;
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          mat.scale * static_cast<double>(mat.generator[t]);
    }
  }
  return out;
}

Eigen::MatrixXd random_legendre_matrix(const PrimeModulus& p, std::uint64_t m, std::uint64_t n,
                                       std::uint64_t x) {
  if (m < 1 || n < 1) throw std::invalid_argument("random_legendre_matrix: empty shape");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::uint64_t j = 0; j < n; ++j) {
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t arg = (x % p.value() + (m * j + i + 1) % p.value()) % p.value();
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scale * static_cast<double>(legendre_symbol(static_cast<std::int64_t>(arg), p));
    }
  }
  return out;
}

Eigen::MatrixXd devore_matrix(const PrimeModulus& q, unsigned degree, std::size_t budget_bytes) {
  if (degree < 1) throw std::invalid_argument("devore_matrix: degree must be >= 1");
  const std::uint64_t qq = q.value();
  std::uint64_t cols = 1;
  for (unsigned t = 0; t <= degree; ++t) {
    if (cols > (std::uint64_t(1) << 40) / qq)
      throw std::length_error("devore_matrix: q^(degree+1) too large");
    cols *= qq;
  }
  const std::uint64_t rows = qq * qq;
  check_budget(rows, cols, sizeof(double), budget_bytes, "devore_matrix");

  const double v = 1.0 / std::sqrt(static_cast<double>(qq));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols));
  // Column c encodes the coefficient tuple of f in base q, constant term in
  // the lowest digit. The column has a single 1 in each row block a*q..a*q+q-1,
  // at offset f(a).
  for (std::uint64_t c = 0; c < cols; ++c) {
    for (std::uint64_t a = 0; a < qq; ++a) {
      std::uint64_t rem = c;
      std::uint64_t value = 0;   // f(a) mod q
      std::uint64_t power = 1;   // a^t mod q
      for (unsigned t = 0; t <= degree; ++t) {
        value = (value + (rem % qq) * power) % qq;
        rem /= qq;
        power = (power * a) % qq;
      }
      out(static_cast<Eigen::Index>(a * qq + value), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

Eigen::MatrixXcd chirp_columns(const PrimeModulus& p, const std::vector<std::uint64_t>& cols) {
  const std::uint64_t q = p.value();
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  const double tau = 6.283185307179586476925286766559 / static_cast<double>(q);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= q * q) throw std::out_of_range("chirp_columns: column index >= p^2");
    const std::uint64_t r = cols[c] / q;
    const std::uint64_t l = cols[c] % q;
    for (std::uint64_t t = 0; t < q; ++t) {
      // Reduce the phase index mod p before touching floating point so large
      // t^2 terms cost no precision.
      const std::uint64_t phase = (r * ((t * t) % q) + l * t) % q;
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
          scale * std::polar(1.0, tau * static_cast<double>(phase));
    }
  }
  return out;
}

Eigen::MatrixXcd chirp_matrix(const PrimeModulus& p, std::size_t budget_bytes) {
  const std::uint64_t q = p.value();
  check_budget(q, q * q, sizeof(std::complex<double>), budget_bytes, "chirp_matrix");
  std::vector<std::uint64_t> all(q * q);
  for (std::uint64_t c = 0; c < q * q; ++c) all[c] = c;
  return chirp_columns(p, all);
}

Eigen::MatrixXd bernoulli_matrix(std::uint64_t m, std::uint64_t n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("bernoulli_matrix: empty shape");
  Rng rng(seed);
  const double v = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < m; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (rng.next_u64() & 1) ? v : -v;
  return out;
}

}  // namespace lcs
