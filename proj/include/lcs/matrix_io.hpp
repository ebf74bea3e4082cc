#pragma once

#include <Eigen/Dense>
#include <string>

namespace lcs {

// Text matrix container. Header line: `rows cols [real|complex]` (kind
// defaults to real); then rows*cols whitespace-separated values row-major,
// complex entries as `re,im` with no interior spaces.
struct LoadedMatrix {
  bool is_complex = false;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd cplx;

  Eigen::Index rows() const { return is_complex ? cplx.rows() : real.rows(); }
  Eigen::Index cols() const { return is_complex ? cplx.cols() : real.cols(); }
};

// Values are written with 17 significant digits, so save/load round-trips
// reproduce doubles bit-exactly.
void save_matrix(const Eigen::MatrixXd& m, const std::string& path);
void save_matrix(const Eigen::MatrixXcd& m, const std::string& path);

// Throws std::runtime_error on unreadable files, malformed headers, or
// value-count mismatches.
LoadedMatrix load_matrix(const std::string& path);

// Plain-bitmap (P1) sign-pattern export, one pixel per entry: nonnegative
// entries map to 0 (white), negative ones to 1 (black).
void save_sign_bitmap(const Eigen::MatrixXd& m, const std::string& path);

}  // namespace lcs
