#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lcs/constructions.hpp"
#include "lcs/numtheory.hpp"

namespace lcs {

struct CoherenceReport {
  std::uint64_t p = 0;  // ambient dimension (columns)
  std::uint64_t m = 0;  // rows
  double mu = 0.0;      // max_{a != b} |<col_a, col_b>| over unit-norm columns
  double bound = 0.0;   // 3 ln(p) / p^(1/4) where that bound applies, else NaN
  std::uint64_t argmax_a = 0;  // 1-based, argmax_a < argmax_b
  std::uint64_t argmax_b = 0;
  bool approximate = false;  // a column budget restricted the scanned pair set

  // "p,m,mu,bound,argmax_a,argmax_b"
  std::string csv_row() const;
  static const char* csv_header() { return "p,m,mu,bound,argmax_a,argmax_b"; }
};

// Exact coherence of the Legendre circulant section. Integer arithmetic
// throughout: for each column difference d the pair inner products are
// length-m windows of the +-1 sequence g[t]*g[(t+d) mod p], scanned with a
// sliding sum. O(p^2) total, parallel over d, deterministic argmax
// tie-break (smallest (a, b) lexicographically).
CoherenceReport coherence(const PartialCirculantMatrix& mat);

// Dense fallback for arbitrary real or complex matrices. Columns are
// normalized first when any norm deviates from 1. column_budget = 0 scans
// every pair; 0 < budget < cols scans a deterministic evenly spaced column
// subset and marks the report approximate.
CoherenceReport coherence(const Eigen::MatrixXd& m, std::size_t column_budget = 0);
CoherenceReport coherence(const Eigen::MatrixXcd& m, std::size_t column_budget = 0);

// Chirp-frame coherence without materializing the p x p^2 matrix: scans a
// stride subset of columns guaranteed to mix quadratic coefficients. Any
// two columns with distinct quadratic coefficients attain the global
// maximum p^(-1/2), so mu is exact even when the scan is budgeted.
// column_budget = 0 scans all p^2 columns (small p only).
CoherenceReport chirp_coherence(const PrimeModulus& p, std::size_t column_budget = 0);

// 3 ln(p) / p^(1/4), natural log. The guarantee behind it is stated only
// for p beyond an unspecified threshold >= 23; below that the value is
// reported as-is (it exceeds 1 there, hence vacuous).
double coherence_bound(const PrimeModulus& p);

// Isometry-constant estimates from coherence. The first form (k * mu) is
// the one the construction's guarantee uses; the Gershgorin form
// ((k - 1) * mu) is the standard sharper variant. Both are reported.
double rip_from_coherence(std::uint64_t k, double mu);
double rip_from_coherence_gershgorin(std::uint64_t k, double mu);

// Sparsity levels guaranteed recoverable at row exponent alpha.
//   guaranteed:  floor(p^(alpha - 1/2) / (18 sqrt(2) ln p)), the full
//                recovery-guarantee constant; 0 at desk scale (documented).
//   scale_only:  floor(p^(1/4) / (3 ln p)), where k * bound reaches 1 for
//                alpha = 3/4; tracks the scaling with the constant dropped.
struct SparsityBudget {
  std::uint64_t guaranteed = 0;
  std::uint64_t scale_only = 0;
};
SparsityBudget max_sparsity(const PrimeModulus& p, unsigned alpha_num, unsigned alpha_den);

// S = sum_{x=0}^{terms} legendre_symbol(f(x), p) for a monic integer
// polynomial f, together with the d (1 + ln p) sqrt(p) budget it must obey.
struct WeylSumRecord {
  std::uint64_t p = 0;
  std::vector<std::int64_t> coeffs;  // ascending degree, monic
  std::uint64_t terms = 0;           // summation endpoint N, inclusive
  std::int64_t value = 0;            // exact signed sum
  double bound = 0.0;                // d (1 + ln p) sqrt(p)
};

// coeffs ascending, leading coefficient must be 1 (throws otherwise);
// 0 <= terms <= p - 1.
WeylSumRecord incomplete_weyl_sum(const std::vector<std::int64_t>& coeffs, const PrimeModulus& p,
                                  std::uint64_t terms);

// Near-isometry probe for the ell-row section rescaled to unit columns:
// certifies the order-2k isometry constant via the proxy 2k * mu_ell and
// compares against the 1/9 threshold. Exhaustive isometry constants are
// exponential; the proxy is the route the construction's own analysis uses.
struct SectionIsometryReport {
  std::uint64_t ell = 0;
  std::uint64_t k = 0;
  double mu = 0.0;        // coherence of the ell-row section
  double delta_2k = 0.0;  // 2k * mu
  bool satisfied = false; // delta_2k < 1/9
};
SectionIsometryReport p1_check(const PartialCirculantMatrix& mat, std::uint64_t k,
                               std::uint64_t ell);
std::uint64_t p1_default_rows(const PrimeModulus& p);      // ceil(p^(5/8))
std::uint64_t p1_default_sparsity(const PrimeModulus& p);  // ceil(p^(1/8) / ln p)

}  // namespace lcs
