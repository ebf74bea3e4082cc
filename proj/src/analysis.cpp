#include "lcs/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace lcs {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Candidate maximum with the deterministic tie-break: larger magnitude wins,
// equal magnitudes go to the lexicographically smaller (a, b).
struct ArgmaxInt {
  std::int64_t abs_value = -1;
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  void offer(std::int64_t abs_v, std::uint64_t ca, std::uint64_t cb) {
    if (abs_v > abs_value ||
        (abs_v == abs_value && (ca < a || (ca == a && cb < b)))) {
      abs_value = abs_v;
      a = ca;
      b = cb;
    }
  }
  void merge(const ArgmaxInt& o) {
    if (o.abs_value >= 0) offer(o.abs_value, o.a, o.b);
  }
};

struct ArgmaxReal {
  double abs_value = -1.0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  void offer(double abs_v, std::uint64_t ca, std::uint64_t cb) {
    if (abs_v > abs_value ||
        (abs_v == abs_value && (ca < a || (ca == a && cb < b)))) {
      abs_value = abs_v;
      a = ca;
      b = cb;
    }
  }
};

std::vector<std::uint64_t> stride_subset(std::uint64_t cols, std::size_t budget) {
  std::vector<std::uint64_t> idx;
  if (budget == 0 || budget >= cols) {
    idx.resize(cols);
    for (std::uint64_t j = 0; j < cols; ++j) idx[j] = j;
    return idx;
  }
  const std::uint64_t stride = cols / budget;
  idx.reserve(budget);
  for (std::uint64_t j = 0; j < budget; ++j) idx.push_back(j * stride);
  return idx;
}

}  // namespace

std::string CoherenceReport::csv_row() const {
  std::string out;
  out += std::to_string(p);
  out += ',';
  out += std::to_string(m);
  out += ',';
  out += fmt17(mu);
  out += ',';
  out += fmt17(bound);
  out += ',';
  out += std::to_string(argmax_a);
  out += ',';
  out += std::to_string(argmax_b);
  return out;
}

CoherenceReport coherence(const PartialCirculantMatrix& mat) {
  const std::uint64_t p = mat.p;
  const std::uint64_t m = mat.rows;
  const auto& g = mat.generator;
  if (p < 3 || g.size() != p) throw std::invalid_argument("coherence: malformed matrix");

  // Columns a and b = a + d (0-based) have the exact sign inner product
  //   W(a) = sum_{i=0}^{m-1} w_d[(a - i) mod p],  w_d[t] = g[t] * g[(t+d) mod p],
  // a length-m window of a fixed +-1 sequence, so each difference d is one
  // O(p) sliding-window pass instead of p windows of length m.
  ArgmaxInt best;
#pragma omp parallel
  {
    ArgmaxInt local;
    std::vector<std::int8_t> w(p);
#pragma omp for schedule(static) nowait
    for (std::int64_t ds = 1; ds < static_cast<std::int64_t>(p); ++ds) {
      const auto d = static_cast<std::uint64_t>(ds);
      for (std::uint64_t t = 0; t < p; ++t)
        w[t] = static_cast<std::int8_t>(g[t] * g[t + d < p ? t + d : t + d - p]);

      std::int64_t window = 0;  // W(0): window i = 0..m-1 over index (0 - i) mod p
      for (std::uint64_t i = 0; i < m; ++i) window += w[(p - i) % p];
      local.offer(std::llabs(window), 0, d);

      for (std::uint64_t a = 1; a + d < p; ++a) {
        // Slide: gain w[a], lose w[(a - m) mod p].
        window += w[a];
        window -= w[(a + p - (m % p)) % p];
        local.offer(std::llabs(window), a, a + d);
      }
    }
#pragma omp critical(lcs_coherence_merge)
    best.merge(local);
  }

  CoherenceReport rep;
  rep.p = p;
  rep.m = m;
  rep.mu = static_cast<double>(best.abs_value) / static_cast<double>(m);
  rep.bound = coherence_bound(PrimeModulus(p));
  rep.argmax_a = best.a + 1;
  rep.argmax_b = best.b + 1;
  rep.approximate = false;
  return rep;
}

namespace {

template <typename Matrix>
CoherenceReport dense_coherence_impl(const Matrix& m, std::size_t column_budget) {
  using Scalar = typename Matrix::Scalar;
  if (m.rows() < 1 || m.cols() < 2)
    throw std::invalid_argument("coherence: need at least 2 columns");

  Matrix cols = m;
  bool need_norm = false;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    const double n = cols.col(j).norm();
    if (std::abs(n - 1.0) > 1e-12) need_norm = true;
  }
  if (need_norm) {
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
      const double n = cols.col(j).norm();
      if (n > 0) cols.col(j) /= n;
    }
  }

  const auto subset = stride_subset(static_cast<std::uint64_t>(cols.cols()), column_budget);
  Matrix sub(cols.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) = cols.col(static_cast<Eigen::Index>(subset[j]));

  Matrix gram = sub.adjoint() * sub;
  ArgmaxReal best;
  for (Eigen::Index a = 0; a + 1 < gram.rows(); ++a)
    for (Eigen::Index b = a + 1; b < gram.cols(); ++b)
      best.offer(std::abs(Scalar(gram(a, b))), subset[static_cast<std::size_t>(a)],
                 subset[static_cast<std::size_t>(b)]);

  CoherenceReport rep;
  rep.p = static_cast<std::uint64_t>(m.cols());
  rep.m = static_cast<std::uint64_t>(m.rows());
  rep.mu = best.abs_value;
  rep.bound = std::numeric_limits<double>::quiet_NaN();
  rep.argmax_a = best.a + 1;
  rep.argmax_b = best.b + 1;
  rep.approximate = subset.size() < static_cast<std::size_t>(m.cols());
  return rep;
}

}  // namespace

CoherenceReport coherence(const Eigen::MatrixXd& m, std::size_t column_budget) {
  return dense_coherence_impl(m, column_budget);
}

CoherenceReport coherence(const Eigen::MatrixXcd& m, std::size_t column_budget) {
  return dense_coherence_impl(m, column_budget);
}

CoherenceReport chirp_coherence(const PrimeModulus& p, std::size_t column_budget) {
  const std::uint64_t q = p.value();
  const std::uint64_t total = q * q;
  const auto subset = stride_subset(total, column_budget);
  const Eigen::MatrixXcd cols = chirp_columns(p, subset);

  Eigen::MatrixXcd gram = cols.adjoint() * cols;
  ArgmaxReal best;
  for (Eigen::Index a = 0; a + 1 < gram.rows(); ++a)
    for (Eigen::Index b = a + 1; b < gram.cols(); ++b)
      best.offer(std::abs(gram(a, b)), subset[static_cast<std::size_t>(a)],
                 subset[static_cast<std::size_t>(b)]);

  CoherenceReport rep;
  rep.p = q;
  rep.m = q;
  rep.mu = best.abs_value;
  // The chirp frame's coherence has the closed form 1/sqrt(p); report it in
  // the bound column as the reference curve.
  rep.bound = 1.0 / std::sqrt(static_cast<double>(q));
  rep.argmax_a = best.a + 1;
  rep.argmax_b = best.b + 1;
  rep.approximate = subset.size() < total;
  return rep;
}

double coherence_bound(const PrimeModulus& p) {
  const double v = static_cast<double>(p.value());
  return 3.0 * std::log(v) / std::pow(v, 0.25);
}

double rip_from_coherence(std::uint64_t k, double mu) {
  if (k < 1) throw std::invalid_argument("rip_from_coherence: k >= 1 required");
  return static_cast<double>(k) * mu;
}

double rip_from_coherence_gershgorin(std::uint64_t k, double mu) {
  if (k < 1) throw std::invalid_argument("rip_from_coherence: k >= 1 required");
  return static_cast<double>(k - 1) * mu;
}

SparsityBudget max_sparsity(const PrimeModulus& p, unsigned alpha_num, unsigned alpha_den) {
  if (alpha_den == 0) throw std::invalid_argument("max_sparsity: alpha_den must be positive");
  const long double v = static_cast<long double>(p.value());
  const long double alpha = static_cast<long double>(alpha_num) / alpha_den;
  const long double lp = std::log(v);
  SparsityBudget out;
  const long double guaranteed = std::pow(v, alpha - 0.5L) / (18.0L * std::sqrt(2.0L) * lp);
  const long double scale_only = std::pow(v, 0.25L) / (3.0L * lp);
  out.guaranteed = guaranteed < 1 ? 0 : static_cast<std::uint64_t>(guaranteed);
  out.scale_only = scale_only < 1 ? 0 : static_cast<std::uint64_t>(scale_only);
  return out;
}

WeylSumRecord incomplete_weyl_sum(const std::vector<std::int64_t>& coeffs, const PrimeModulus& p,
                                  std::uint64_t terms) {
  if (coeffs.size() < 2 || coeffs.back() != 1)
    throw std::invalid_argument("incomplete_weyl_sum: f must be monic of degree >= 1");
  if (terms > p.value() - 1)
    throw std::invalid_argument("incomplete_weyl_sum: endpoint beyond one period");
  const std::uint64_t q = p.value();

  std::vector<std::uint64_t> c(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::int64_t r = coeffs[i] % static_cast<std::int64_t>(q);
    if (r < 0) r += static_cast<std::int64_t>(q);
    c[i] = static_cast<std::uint64_t>(r);
  }

  WeylSumRecord rec;
  rec.p = q;
  rec.coeffs = coeffs;
  rec.terms = terms;
  for (std::uint64_t x = 0; x <= terms; ++x) {
    std::uint64_t acc = 0;  // Horner, everything reduced mod p
    for (std::size_t i = coeffs.size(); i-- > 0;)
      acc = static_cast<std::uint64_t>(
          (static_cast<unsigned __int128>(acc) * x + c[i]) % q);
    rec.value += legendre_symbol(static_cast<std::int64_t>(acc), p);
  }
  const double d = static_cast<double>(coeffs.size() - 1);
  rec.bound = d * (1.0 + std::log(static_cast<double>(q))) * std::sqrt(static_cast<double>(q));
  return rec;
}

SectionIsometryReport p1_check(const PartialCirculantMatrix& mat, std::uint64_t k,
                               std::uint64_t ell) {
  if (ell < 1 || ell > mat.rows) throw std::invalid_argument("p1_check: ell outside [1, rows]");
  if (k < 1) throw std::invalid_argument("p1_check: k >= 1 required");
  SectionIsometryReport rep;
  rep.ell = ell;
  rep.k = k;
  rep.mu = coherence(mat.restricted(ell, true)).mu;
  rep.delta_2k = 2.0 * static_cast<double>(k) * rep.mu;
  rep.satisfied = rep.delta_2k < 1.0 / 9.0;
  return rep;
}

std::uint64_t p1_default_rows(const PrimeModulus& p) { return ceil_pow_frac(p.value(), 5, 8); }

std::uint64_t p1_default_sparsity(const PrimeModulus& p) {
  const long double v = static_cast<long double>(p.value());
  return static_cast<std::uint64_t>(std::ceil(std::pow(v, 0.125L) / std::log(v)));
}

}  // namespace lcs
