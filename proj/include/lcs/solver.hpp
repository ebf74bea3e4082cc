#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lcs/linear_operator.hpp"

namespace lcs {

struct SolverConfig {
  int max_iterations = 25000;
  double feasibility_tol = 1e-8;  // constraint residual, relative to max(1, |y|)
  double rel_tol = 1e-9;          // splitting fixed-point residual, relative
  double prox_step = 0.0;         // soft-threshold level; 0 picks one from the data
  double relaxation = 1.0;        // averaging factor in (0, 2)
};

struct RecoveryResult {
  Eigen::VectorXd xhat;
  Eigen::VectorXd nuhat;  // noise estimate; only quantized recovery fills it
  int iterations = 0;
  double residual = 0.0;   // final constraint violation (absolute)
  double objective = 0.0;  // l1 norm of xhat
  bool converged = false;  // implies residual <= feasibility_tol * max(1, |y|)
};

// min |z|_1  s.t.  A z = y, by Douglas-Rachford splitting between the
// soft-threshold prox and the affine projection. The projection uses the
// pseudoinverse of the smaller Gram (A A^T or A^T A), assembled once with
// one operator-pair call per dimension; rank deficiency and rows > cols
// are both handled. A is accessed through matvec/adjoint only.
RecoveryResult basis_pursuit(const LinearOperator& a, const Eigen::VectorXd& y,
                             const SolverConfig& cfg = {});

// min |z|_1  over (z, nu)  s.t.
//   || D^(-r) (A z + nu - q) ||_2 <= c_r * delta * sqrt(m),
//   || nu ||_2 <= epsilon * sqrt(m)         (epsilon = 0 pins nu = 0),
// where A is the rotated measurement operator. Internally the slack
// omega = D^(-r)(A z + nu - q) is carried as part of the splitting variable:
// the affine set {A z + nu - D^r omega = q} gets an exact projection through
// a well-conditioned Cholesky factor (the Gram plus identity terms), and
// both norm constraints become plain ball projections. This keeps every
// iterate's constraint violation directly measurable without applying
// D^(-r) to a residual, which for r >= 2 would amplify split error by the
// inverse of the smallest singular value of D^r.
RecoveryResult one_stage_recover(const LinearOperator& a, const Eigen::VectorXd& q, unsigned r,
                                 double delta, double c_r, double epsilon,
                                 const SolverConfig& cfg = {});

// 10 log10(|x| / |x - xhat|), the norm (not power) ratio, with exact
// recovery capped at 999 dB. Throws std::invalid_argument when x = 0.
double snr_db(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat);

}  // namespace lcs
