#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "lcs/constructions.hpp"
#include "lcs/linear_operator.hpp"

namespace lcs {

// Fast action of a PartialCirculantMatrix. One length-p cyclic correlation
// gives the full square product; the section keeps the first m outputs, so
// matvec and adjoint cost O(p log p) instead of O(m p).
//
// Conventions (the dense matrix is the arbiter, see tests):
//   matvec:  out[i] = scale * sum_j x[j] * g[(j - i) mod p], i < m
//            computed as inverse_dft(dft(x) * conj(dft(g))) / p
//   adjoint: out[j] = scale * sum_{i<m} y[i] * g[(j - i) mod p]
//            computed as inverse_dft(dft(pad(y)) * dft(g)) / p
//
// Transform plans are created once under a global planner lock with
// deterministic (estimate-only) planning; each call uses its own buffers,
// so a constructed operator is safe to share across threads.
class CirculantOperator final : public LinearOperator {
 public:
  explicit CirculantOperator(PartialCirculantMatrix mat);
  ~CirculantOperator() override;
  CirculantOperator(const CirculantOperator&) = delete;
  CirculantOperator& operator=(const CirculantOperator&) = delete;

  const PartialCirculantMatrix& matrix() const noexcept { return mat_; }
  Eigen::Index rows() const override { return static_cast<Eigen::Index>(mat_.rows); }
  Eigen::Index cols() const override { return static_cast<Eigen::Index>(mat_.p); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override;

  // Cached forward transform of the generator (half spectrum, p/2 + 1 bins).
  const std::vector<std::complex<double>>& generator_spectrum() const noexcept {
    return gen_spectrum_;
  }

  // Exact integer sum over i < m of g[(a - i) mod p] * g[(b - i) mod p]
  // for 0-based columns a, b. Divided by m this is the normalized Gram
  // entry; every digit is exact, no accumulation error.
  std::int64_t column_sign_inner(std::uint64_t a, std::uint64_t b) const;
  double gram_column_inner(std::uint64_t a, std::uint64_t b) const {
    return static_cast<double>(column_sign_inner(a, b)) / static_cast<double>(mat_.rows);
  }

 private:
  struct Plans;
  PartialCirculantMatrix mat_;
  std::vector<std::complex<double>> gen_spectrum_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace lcs
