#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lcs/analysis.hpp"
#include "lcs/quantization.hpp"
#include "lcs/solver.hpp"

namespace lcs::harness {

enum class Construction { kLegendre, kBernoulli, kDevore, kChirp, kRandomLegendre, kFile };

const char* construction_name(Construction c);

// One bag of knobs shared by every experiment runner; each runner reads the
// fields it needs and ships documented defaults for the rest. All runs are
// deterministic: every (p, k, trial) cell derives its own generator stream
// from (seed, experiment id, p, k, trial), so results are independent of
// scheduling and of which other cells are present.
struct ExperimentSpec {
  std::uint64_t p_lo = 0;  // prime sweep bounds, inclusive; equal for fixed p
  std::uint64_t p_hi = 0;
  int k_lo = 0;  // sparsity grid; equal bounds for fixed k
  int k_hi = 0;
  int k_step = 1;
  int trials = 10;
  std::uint64_t seed = 0;
  unsigned alpha_num = 3;
  unsigned alpha_den = 4;
  bool floor_rows = false;
  std::vector<Construction> constructions;  // empty -> per-experiment default
  std::string matrix_file;                  // backing file for Construction::kFile
  std::uint64_t signal_dim = 0;             // 0 -> full column count
  unsigned r = 1;
  double delta = 0.05;
  unsigned levels = 0;  // 0 -> smallest alphabet covering the input with 20% margin
  double epsilon = 0.0;
  double success_db = 50.0;   // success threshold on the norm-ratio dB scale
  std::size_t max_primes = 0; // 0 -> all primes in range; else evenly indexed subset
  SolverConfig solver;
};

// Least-squares slope of ln(y) against ln(x); requires >= 2 points, x,y > 0.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Coherence of measured constructions across a prime sweep, with per
// construction log-log slopes. CSV: construction,p,m,mu,bound,argmax_a,
// argmax_b; slopes appended as trailing `# slope,<construction>,<value>`
// comment lines.
struct CoherenceSweep {
  struct Row {
    Construction construction;
    CoherenceReport report;
  };
  std::vector<Row> rows;
  std::vector<std::pair<Construction, double>> slopes;
  std::string csv() const;
};
CoherenceSweep exp1_coherence_sweep(const ExperimentSpec& spec);

// Success-fraction tables for the recovery experiments. CSV:
// construction,p,m,k,trials,successes,fraction.
struct SuccessCurves {
  struct Cell {
    Construction construction;
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    int k = 0;
    int trials = 0;
    int successes = 0;
    bool all_converged = true;
  };
  std::vector<Cell> cells;
  bool any_nonconverged = false;
  std::string csv() const;
};

// Fixed matrix sizes, sparsity sweep (defaults: p 997, signals in R^300,
// k = 2..102, Legendre/Bernoulli/polynomial constructions, plus an external
// matrix file when supplied).
SuccessCurves exp2_success_vs_sparsity(const ExperimentSpec& spec);

// Fixed sparsity, prime sweep with floor-rounded row counts (defaults:
// primes 41..293, k in {10, 20}, signals in R^40, Legendre vs Bernoulli).
SuccessCurves exp3_success_vs_p(const ExperimentSpec& spec);

// Highest recoverable sparsity per prime: k grows from 1 until some trial
// drops below the success threshold; the last fully successful level is
// reported next to the p^(3/4) comparator. CSV: p,m,g,comparator plus a
// trailing `# slope,<value>` comment.
struct SparsityLevels {
  struct Row {
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    int g = 0;
    double comparator = 0.0;
  };
  std::vector<Row> rows;
  bool any_nonconverged = false;
  double slope = 0.0;
  bool has_slope = false;
  std::string csv() const;
};
SparsityLevels exp4_max_sparsity(const ExperimentSpec& spec);

// Quantized-measurement pipeline error sweep: fixed k, primes ascending,
// median l2 reconstruction error per prime over the trial set. CSV:
// p,m,k,r,delta,trials,median_err.
struct QuantizedErrors {
  struct Row {
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    int k = 0;
    unsigned r = 0;
    double delta = 0.0;
    int trials = 0;
    double median_err = 0.0;
  };
  std::vector<Row> rows;
  bool any_nonconverged = false;
  std::string csv() const;
};
QuantizedErrors exp_quantized(const ExperimentSpec& spec);

// Per-trial recovery table for one (construction, p, k) cell. CSV:
// trial,k,p,m,snr_db,success,iterations.
struct TrialTable {
  struct Row {
    int trial = 0;
    int k = 0;
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    double snr_db = 0.0;
    bool success = false;
    int iterations = 0;
  };
  std::vector<Row> rows;
  bool any_nonconverged = false;
  std::string csv() const;
};
TrialTable recover_trials(const ExperimentSpec& spec);

// Per-trial quantizer statistics (measurements from the Legendre operator).
// CSV: r,delta,levels,m,u_inf,stable.
struct QuantizeTable {
  std::vector<QuantizationRun> runs;
  std::string csv() const;
};
QuantizeTable quantize_runs(const ExperimentSpec& spec);

// Sign-pattern bitmap of the Legendre section for the spec'd p.
void render_matrix(const ExperimentSpec& spec, const std::string& path);

// Materialize the selected construction and save it in the text format.
void generate_matrix(const ExperimentSpec& spec, const std::string& path);

}  // namespace lcs::harness
