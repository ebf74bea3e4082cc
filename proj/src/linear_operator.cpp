#include "lcs/linear_operator.hpp"

#include <stdexcept>

namespace lcs {

ColumnRestrictedOperator::ColumnRestrictedOperator(const LinearOperator& inner,
                                                   Eigen::Index keep_cols)
    : inner_(&inner), keep_(keep_cols) {
  if (keep_cols < 1 || keep_cols > inner.cols())
    throw std::invalid_argument("ColumnRestrictedOperator: keep_cols outside [1, cols]");
}

Eigen::VectorXd ColumnRestrictedOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != keep_) throw std::invalid_argument("ColumnRestrictedOperator::apply: length");
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(inner_->cols());
  padded.head(keep_) = x;
  return inner_->apply(padded);
}

Eigen::VectorXd ColumnRestrictedOperator::apply_adjoint(const Eigen::VectorXd& y) const {
  return inner_->apply_adjoint(y).head(keep_);
}

LeftMatrixOperator::LeftMatrixOperator(Eigen::MatrixXd u, const LinearOperator& inner)
    : u_(std::move(u)), inner_(&inner) {
  if (u_.cols() != inner.rows())
    throw std::invalid_argument("LeftMatrixOperator: inner rows mismatch");
}

}  // namespace lcs
