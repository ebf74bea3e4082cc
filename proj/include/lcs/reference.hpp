#pragma once

#include <Eigen/Dense>

#include "lcs/analysis.hpp"
#include "lcs/constructions.hpp"

// Serial reference kernels: straight-line implementations of the hot paths,
// kept as independent oracles for the parallel/FFT versions and as the
// baseline side of the benchmark target. No OpenMP, no transforms, no
// sliding-window tricks.
namespace lcs::reference {

// Entrywise evaluation of the defining formula: scale at i == j, otherwise
// scale * legendre_symbol(j - i, p). Independent of the generator layout
// used by the production construction.
Eigen::MatrixXd dense_from_definition(const PrimeModulus& p, std::uint64_t m, double scale);

// O(m p) direct product with the defining entries.
Eigen::VectorXd matvec(const PartialCirculantMatrix& mat, const Eigen::VectorXd& x);
Eigen::VectorXd adjoint_matvec(const PartialCirculantMatrix& mat, const Eigen::VectorXd& y);

// Per-pair Gram scan, O(p^2 m), single thread.
CoherenceReport coherence(const PartialCirculantMatrix& mat);

}  // namespace lcs::reference
