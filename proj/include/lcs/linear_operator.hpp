#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <utility>

namespace lcs {

// Matrix action by matvec/adjoint only. Solvers accept this interface and
// never read entries, so fast structured implementations are used as-is.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd a) : a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override { return a_ * x; }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override {
    return a_.transpose() * y;
  }
  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

// First keep_cols columns of a wider operator (signal padded with zeros on
// apply, adjoint output truncated). Does not own the inner operator.
class ColumnRestrictedOperator final : public LinearOperator {
 public:
  ColumnRestrictedOperator(const LinearOperator& inner, Eigen::Index keep_cols);
  Eigen::Index rows() const override { return inner_->rows(); }
  Eigen::Index cols() const override { return keep_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override;

 private:
  const LinearOperator* inner_;
  Eigen::Index keep_;
};

// u * inner for a square orthogonal u (preprocessed measurements).
// Does not own the inner operator.
class LeftMatrixOperator final : public LinearOperator {
 public:
  LeftMatrixOperator(Eigen::MatrixXd u, const LinearOperator& inner);
  Eigen::Index rows() const override { return u_.rows(); }
  Eigen::Index cols() const override { return inner_->cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override { return u_ * inner_->apply(x); }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override {
    return inner_->apply_adjoint(u_.transpose() * y);
  }

 private:
  Eigen::MatrixXd u_;
  const LinearOperator* inner_;
};

// Pass-through wrapper that counts calls; tests use it to prove the solvers
// touch operators only through the action interface.
class CountingOperator final : public LinearOperator {
 public:
  explicit CountingOperator(const LinearOperator& inner) : inner_(&inner) {}
  Eigen::Index rows() const override { return inner_->rows(); }
  Eigen::Index cols() const override { return inner_->cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override {
    ++applies_;
    return inner_->apply(x);
  }
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override {
    ++adjoints_;
    return inner_->apply_adjoint(y);
  }
  long applies() const { return applies_.load(); }
  long adjoints() const { return adjoints_.load(); }

 private:
  const LinearOperator* inner_;
  mutable std::atomic<long> applies_{0};
  mutable std::atomic<long> adjoints_{0};
};

}  // namespace lcs
