#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "lcs/linear_operator.hpp"

namespace lcs {

// Dense r-th power of the m x m lower-bidiagonal difference matrix
// (unit diagonal, -1 subdiagonal). Entry (i, j) is the signed binomial
// (-1)^(i-j) C(r, i-j) for 0 <= i - j <= r, zero elsewhere. r = 0 gives
// the identity (memoryless quantization baseline).
struct DifferenceMatrix {
  std::uint64_t m = 0;
  unsigned r = 0;
  Eigen::MatrixXd dense;
};
DifferenceMatrix difference_power(std::uint64_t m, unsigned r);

// x -> D^r x by r rounds of adjacent differences; x -> D^(-r) x by r rounds
// of cumulative sums; x -> (D^r)^T x by r rounds of reversed differences.
// The inverse is never formed as a matrix.
Eigen::VectorXd apply_difference_power(const Eigen::VectorXd& x, unsigned r);
Eigen::VectorXd apply_difference_inverse(const Eigen::VectorXd& x, unsigned r);
Eigen::VectorXd apply_difference_power_adjoint(const Eigen::VectorXd& x, unsigned r);

// SVD factors of D^r with a deterministic sign convention: the largest
// magnitude entry of each left singular vector (first occurrence on ties)
// is made positive. Singular values descend.
struct PreprocessedFrame {
  std::uint64_t m = 0;
  unsigned r = 0;
  Eigen::MatrixXd u;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd v;
};
PreprocessedFrame svd_preprocess(std::uint64_t m, unsigned r);

// One quantization pass. The alphabet is midrise with L levels per side,
// points {+-(2l - 1) delta/2 : l = 1..L}; the defining relation
// y - q = D^r u holds exactly by construction of the state recursion.
struct QuantizationRun {
  unsigned r = 0;
  double delta = 0.0;
  unsigned levels = 0;
  Eigen::VectorXd q;
  Eigen::VectorXd u;
  double u_inf = 0.0;
  bool stable = false;  // u stayed within the delta/2 greedy bound

  // "r,delta,levels,m,u_inf,stable" with stable as 0/1
  std::string csv_row() const;
  static const char* csv_header() { return "r,delta,levels,m,u_inf,stable"; }
};

// Inputs with |y_i| <= stable_input_range(...) keep the greedy state within
// delta/2 (alphabet coverage argument); beyond it the state may escape and
// the run is flagged unstable rather than rejected.
double stable_input_range(unsigned r, unsigned levels, double delta);

// Greedy r-th order noise shaping, r in {1, 2, 3}: at step i the alphabet
// point nearest to y_i + sum_{t=1..r} (-1)^(t+1) C(r,t) u_{i-t} is emitted
// (states before the start are zero; exact midpoints round up).
QuantizationRun sigma_delta_quantize(const Eigen::VectorXd& y, unsigned r, double delta,
                                     unsigned levels);

// Memoryless per-sample rounding to the same alphabet (the r = 0 baseline).
QuantizationRun scalar_quantize(const Eigen::VectorXd& y, double delta, unsigned levels);

// Measurement-side assembly for quantized recovery: rotates measurements by
// the left SVD factor (y = U Phi x + noise), quantizes, and packages the
// constraint radii. c_r is certified from the measured state,
// c_r = u_inf/delta, so the true signal is always feasible for
//   || D^(-r) (U Phi z + nu - q) ||_2 <= c_r * delta * sqrt(m)
//   || nu ||_2 <= epsilon * sqrt(m).
// `noise`, when given, must have l2 norm <= epsilon * sqrt(m).
struct OneStageData {
  LeftMatrixOperator effective;  // U * Phi; references the caller's operator
  Eigen::VectorXd y;             // rotated (pre-quantization) measurements
  Eigen::VectorXd q;
  QuantizationRun run;
  double c_r = 0.0;
  double radius_state = 0.0;  // c_r * delta * sqrt(m)
  double radius_noise = 0.0;  // epsilon * sqrt(m)
};
OneStageData assemble_one_stage(const LinearOperator& phi, const PreprocessedFrame& frame,
                                const Eigen::VectorXd& x, unsigned r, double delta,
                                unsigned levels, double epsilon,
                                const Eigen::VectorXd* noise = nullptr);

}  // namespace lcs
