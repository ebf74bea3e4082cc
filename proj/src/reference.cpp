#include "lcs/reference.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lcs::reference {

Eigen::MatrixXd dense_from_definition(const PrimeModulus& p, std::uint64_t m, double scale) {
  const std::uint64_t q = p.value();
  if (m < 1 || m > q) throw std::invalid_argument("dense_from_definition: m outside [1, p]");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(q));
  for (std::uint64_t i = 0; i < m; ++i) {
    for (std::uint64_t j = 0; j < q; ++j) {
      const double v =
          (i == j) ? 1.0
                   : static_cast<double>(legendre_symbol(
                         static_cast<std::int64_t>(j) - static_cast<std::int64_t>(i), p));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scale * v;
    }
  }
  return out;
}

Eigen::VectorXd matvec(const PartialCirculantMatrix& mat, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(mat.p))
    throw std::invalid_argument("reference::matvec: length != p");
  Eigen::VectorXd out(static_cast<Eigen::Index>(mat.rows));
  for (std::uint64_t i = 0; i < mat.rows; ++i) {
    double acc = 0;
    for (std::uint64_t j = 0; j < mat.p; ++j)
      acc += static_cast<double>(mat.generator[(j + mat.p - i) % mat.p]) *
             x[static_cast<Eigen::Index>(j)];
    out[static_cast<Eigen::Index>(i)] = mat.scale * acc;
  }
  return out;
}

Eigen::VectorXd adjoint_matvec(const PartialCirculantMatrix& mat, const Eigen::VectorXd& y) {
  if (y.size() != static_cast<Eigen::Index>(mat.rows))
    throw std::invalid_argument("reference::adjoint_matvec: length != m");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mat.p));
  for (std::uint64_t i = 0; i < mat.rows; ++i) {
    const double w = mat.scale * y[static_cast<Eigen::Index>(i)];
    for (std::uint64_t j = 0; j < mat.p; ++j)
      out[static_cast<Eigen::Index>(j)] +=
          w * static_cast<double>(mat.generator[(j + mat.p - i) % mat.p]);
  }
  return out;
}

CoherenceReport coherence(const PartialCirculantMatrix& mat) {
  const std::uint64_t p = mat.p;
  const std::uint64_t m = mat.rows;
  std::int64_t best = -1;
  std::uint64_t best_a = 0, best_b = 0;
  for (std::uint64_t a = 0; a < p; ++a) {
    for (std::uint64_t b = a + 1; b < p; ++b) {
      std::int64_t sum = 0;
      for (std::uint64_t i = 0; i < m; ++i)
        sum += static_cast<std::int64_t>(mat.generator[(a + p - i) % p]) *
               mat.generator[(b + p - i) % p];
      const std::int64_t av = std::llabs(sum);
      if (av > best) {
        best = av;
        best_a = a;
        best_b = b;
      }
    }
  }
  CoherenceReport rep;
  rep.p = p;
  rep.m = m;
  rep.mu = static_cast<double>(best) / static_cast<double>(m);
  rep.bound = coherence_bound(PrimeModulus(p));
  rep.argmax_a = best_a + 1;
  rep.argmax_b = best_b + 1;
  return rep;
}

}  // namespace lcs::reference
