#include "lcs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>

#include "lcs/circulant.hpp"
#include "lcs/matrix_io.hpp"

namespace lcs::harness {

namespace {

// Stream ids: one per entry point, then one tag level per random object.
// Changing any id is a breaking change for recorded outputs.
constexpr std::uint64_t kStreamExp1 = 1;
constexpr std::uint64_t kStreamExp2 = 2;
constexpr std::uint64_t kStreamExp3 = 3;
constexpr std::uint64_t kStreamExp4 = 4;
constexpr std::uint64_t kStreamExpQ = 5;
constexpr std::uint64_t kStreamRecover = 6;
constexpr std::uint64_t kStreamQuantize = 7;
constexpr std::uint64_t kStreamGen = 8;
constexpr std::uint64_t kTagSignal = 0;
constexpr std::uint64_t kTagMatrix = 1;
constexpr std::uint64_t kTagNoise = 2;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Odd primes in [lo, hi]; max_subset = 0 keeps all, otherwise an evenly
// indexed subset including both endpoints.
std::vector<std::uint64_t> odd_primes(std::uint64_t lo, std::uint64_t hi,
                                      std::size_t max_subset) {
  std::vector<std::uint64_t> ps = primes_in_range(std::max<std::uint64_t>(lo, 3), hi);
  if (ps.empty()) throw std::invalid_argument("no odd primes in the requested range");
  if (max_subset == 0 || ps.size() <= max_subset) return ps;
  std::vector<std::uint64_t> out;
  out.reserve(max_subset);
  if (max_subset == 1) {
    out.push_back(ps.back());
    return out;
  }
  for (std::size_t i = 0; i < max_subset; ++i)
    out.push_back(ps[i * (ps.size() - 1) / (max_subset - 1)]);
  return out;
}

Eigen::VectorXd sparse_gaussian(Rng rng, Eigen::Index n, int k) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const auto pos = rng.sample_without_replacement(static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(k));
  for (std::uint64_t i : pos) x[static_cast<Eigen::Index>(i)] = rng.next_gaussian();
  return x;
}

bool is_success(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat, double db) {
  if (x.norm() == 0.0) return xhat.norm() == 0.0;
  return snr_db(x, xhat) > db;
}

Rounding rounding_of(const ExperimentSpec& s) {
  return s.floor_rows ? Rounding::kFloor : Rounding::kCeil;
}

// Largest odd prime q with q^2 <= m; sizes the polynomial construction to
// sit just under a given row budget.
std::uint64_t devore_base(std::uint64_t m) {
  for (std::uint64_t q = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m))) + 1;
       q >= 3; --q)
    if (q * q <= m && is_prime(q)) return q;
  throw std::invalid_argument("row budget below the smallest polynomial construction (q = 3)");
}

// Owning bundle for constructions that are fixed across trials. The exposed
// operator is always restricted to the signal dimension.
struct FixedOperator {
  std::unique_ptr<CirculantOperator> circulant;
  std::unique_ptr<DenseOperator> dense;
  std::unique_ptr<ColumnRestrictedOperator> view;
  const LinearOperator* op = nullptr;
  std::uint64_t rows = 0;
  std::uint64_t ambient = 0;  // column count before restriction
};

bool per_trial_matrix(Construction c) {
  return c == Construction::kBernoulli || c == Construction::kRandomLegendre;
}

FixedOperator make_fixed_operator(Construction c, std::uint64_t p, std::uint64_t m,
                                  Eigen::Index n, const ExperimentSpec& spec) {
  FixedOperator f;
  switch (c) {
    case Construction::kLegendre: {
      const PrimeModulus pm(p);
      if (static_cast<std::uint64_t>(n) > p)
        throw std::invalid_argument("signal dimension exceeds the ambient column count");
      f.circulant = std::make_unique<CirculantOperator>(legendre_partial_circulant_rows(pm, m));
      f.view = std::make_unique<ColumnRestrictedOperator>(*f.circulant, n);
      f.rows = m;
      f.ambient = p;
      break;
    }
    case Construction::kDevore: {
      const std::uint64_t q = devore_base(m);
      const PrimeModulus pm(q);
      const std::uint64_t ambient = q * q * q;
      if (static_cast<std::uint64_t>(n) > ambient)
        throw std::invalid_argument("signal dimension exceeds the polynomial column count");
      f.dense = std::make_unique<DenseOperator>(devore_matrix(pm, 2));
      f.view = std::make_unique<ColumnRestrictedOperator>(*f.dense, n);
      f.rows = q * q;
      f.ambient = ambient;
      break;
    }
    case Construction::kFile: {
      if (spec.matrix_file.empty())
        throw std::invalid_argument("file construction requested without a matrix file");
      LoadedMatrix lm = load_matrix(spec.matrix_file);
      if (lm.is_complex)
        throw std::invalid_argument("complex matrices are not usable for real recovery");
      if (lm.cols() < n)
        throw std::invalid_argument("signal dimension exceeds the file's column count");
      f.rows = static_cast<std::uint64_t>(lm.real.rows());
      f.ambient = static_cast<std::uint64_t>(lm.real.cols());
      f.dense = std::make_unique<DenseOperator>(std::move(lm.real));
      f.view = std::make_unique<ColumnRestrictedOperator>(*f.dense, n);
      break;
    }
    default:
      throw std::invalid_argument("construction has no fixed-matrix form here");
  }
  f.op = f.view.get();
  return f;
}

// Per-trial matrix for the randomized baselines.
DenseOperator make_trial_operator(Construction c, std::uint64_t p, std::uint64_t m,
                                  Eigen::Index n, Rng matrix_rng) {
  if (c == Construction::kBernoulli)
    return DenseOperator(bernoulli_matrix(m, static_cast<std::uint64_t>(n),
                                          matrix_rng.next_u64()));
  const PrimeModulus pm(p);
  return DenseOperator(random_legendre_matrix(pm, m, static_cast<std::uint64_t>(n),
                                              matrix_rng.next_below(p)));
}

struct CellDef {
  Construction c;
  std::uint64_t p = 0;  // reported ambient parameter (prime, or file columns)
  std::uint64_t m = 0;
  std::uint64_t prime = 0;  // sizing prime for per-trial draws
  int k = 0;
  const LinearOperator* fixed_op = nullptr;
};

SuccessCurves run_cells(const ExperimentSpec& spec, std::uint64_t stream,
                        const std::vector<CellDef>& defs, Eigen::Index n) {
  for (const CellDef& d : defs)
    if (d.k < 1 || static_cast<Eigen::Index>(d.k) > n)
      throw std::invalid_argument("sparsity level outside [1, signal dimension]");
  if (spec.trials < 1) throw std::invalid_argument("trials must be positive");

  const std::size_t total = defs.size() * static_cast<std::size_t>(spec.trials);
  std::vector<std::uint8_t> succ(total, 0), conv(total, 1);
  bool failed = false;
  std::string error;

#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    if (failed) continue;
    try {
      const CellDef& d = defs[static_cast<std::size_t>(idx) / spec.trials];
      const int trial = static_cast<int>(idx % spec.trials);
      Rng cell_rng = Rng(spec.seed)
                         .derive(stream)
                         .derive(d.p)
                         .derive(static_cast<std::uint64_t>(d.k))
                         .derive(static_cast<std::uint64_t>(trial));
      const Eigen::VectorXd x = sparse_gaussian(cell_rng.derive(kTagSignal), n, d.k);
      RecoveryResult res;
      if (d.fixed_op) {
        res = basis_pursuit(*d.fixed_op, d.fixed_op->apply(x), spec.solver);
      } else {
        const DenseOperator a =
            make_trial_operator(d.c, d.prime, d.m, n, cell_rng.derive(kTagMatrix));
        res = basis_pursuit(a, a.apply(x), spec.solver);
      }
      succ[idx] = is_success(x, res.xhat, spec.success_db) ? 1 : 0;
      conv[idx] = res.converged ? 1 : 0;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          error = e.what();
        }
      }
    }
  }
  if (failed) throw std::runtime_error(error);

  SuccessCurves out;
  out.cells.reserve(defs.size());
  for (std::size_t c = 0; c < defs.size(); ++c) {
    SuccessCurves::Cell cell;
    cell.construction = defs[c].c;
    cell.p = defs[c].p;
    cell.m = defs[c].m;
    cell.k = defs[c].k;
    cell.trials = spec.trials;
    for (int t = 0; t < spec.trials; ++t) {
      const std::size_t idx = c * spec.trials + t;
      cell.successes += succ[idx];
      cell.all_converged = cell.all_converged && conv[idx];
    }
    out.any_nonconverged = out.any_nonconverged || !cell.all_converged;
    out.cells.push_back(cell);
  }
  return out;
}

std::vector<int> k_grid(int lo, int hi, int step) {
  if (lo < 1 || hi < lo || step < 1) throw std::invalid_argument("bad sparsity grid");
  std::vector<int> ks;
  for (int k = lo; k <= hi; k += step) ks.push_back(k);
  return ks;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* construction_name(Construction c) {
  switch (c) {
    case Construction::kLegendre: return "legendre";
    case Construction::kBernoulli: return "bernoulli";
    case Construction::kDevore: return "devore";
    case Construction::kChirp: return "chirp";
    case Construction::kRandomLegendre: return "random-legendre";
    case Construction::kFile: return "file";
  }
  return "?";
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching lists with >= 2 points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0 || ys[i] <= 0) throw std::invalid_argument("loglog_slope: positive data only");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0) throw std::invalid_argument("loglog_slope: x values must not all coincide");
  return num / den;
}

std::string CoherenceSweep::csv() const {
  std::string s = "construction,";
  s += CoherenceReport::csv_header();
  s += '\n';
  for (const Row& r : rows) {
    s += construction_name(r.construction);
    s += ',';
    s += r.report.csv_row();
    s += '\n';
  }
  for (const auto& [c, slope] : slopes) {
    s += "# slope,";
    s += construction_name(c);
    s += ',';
    s += fmt17(slope);
    s += '\n';
  }
  return s;
}

CoherenceSweep exp1_coherence_sweep(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) s.p_lo = 71;
  if (s.p_hi == 0) s.p_hi = 1193;
  const std::vector<Construction> cons =
      s.constructions.empty()
          ? std::vector<Construction>{Construction::kLegendre, Construction::kChirp}
          : s.constructions;
  const std::vector<std::uint64_t> primes = odd_primes(s.p_lo, s.p_hi, s.max_primes);

  CoherenceSweep out;
  for (Construction c : cons) {
    std::vector<double> ps, mus;
    for (std::uint64_t p : primes) {
      const PrimeModulus pm(p);
      CoherenceReport rep;
      switch (c) {
        case Construction::kLegendre:
          rep = coherence(legendre_partial_circulant(pm, s.alpha_num, s.alpha_den,
                                                     rounding_of(s)));
          break;
        case Construction::kChirp:
          // All column pairs while the frame is small; a mixing stride
          // subset beyond that (still exact, see chirp_coherence).
          rep = chirp_coherence(pm, p <= 47 ? 0 : 64);
          break;
        case Construction::kBernoulli: {
          const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
          const std::uint64_t seed = Rng(s.seed)
                                         .derive(kStreamExp1)
                                         .derive(p)
                                         .derive(kTagMatrix)
                                         .next_u64();
          rep = coherence(bernoulli_matrix(m, p, seed));
          break;
        }
        default:
          throw std::invalid_argument("coherence sweep supports legendre, chirp, bernoulli");
      }
      out.rows.push_back({c, rep});
      ps.push_back(static_cast<double>(p));
      mus.push_back(rep.mu);
    }
    if (ps.size() >= 2) out.slopes.emplace_back(c, loglog_slope(ps, mus));
  }
  return out;
}

std::string SuccessCurves::csv() const {
  std::string s = "construction,p,m,k,trials,successes,fraction\n";
  for (const Cell& c : cells) {
    s += construction_name(c.construction);
    s += ',';
    s += std::to_string(c.p);
    s += ',';
    s += std::to_string(c.m);
    s += ',';
    s += std::to_string(c.k);
    s += ',';
    s += std::to_string(c.trials);
    s += ',';
    s += std::to_string(c.successes);
    s += ',';
    s += fmt6(static_cast<double>(c.successes) / static_cast<double>(c.trials));
    s += '\n';
  }
  return s;
}

SuccessCurves exp2_success_vs_sparsity(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) s.p_lo = 997;
  if (s.p_hi == 0) s.p_hi = s.p_lo;
  if (s.k_lo == 0 && s.k_hi == 0) {
    s.k_lo = 2;
    s.k_hi = 102;
    s.k_step = 4;
  }
  if (s.k_hi == 0) s.k_hi = s.k_lo;
  if (s.signal_dim == 0) s.signal_dim = 300;
  std::vector<Construction> cons = s.constructions;
  if (cons.empty())
    cons = {Construction::kLegendre, Construction::kBernoulli, Construction::kDevore};
  if (!s.matrix_file.empty() &&
      std::find(cons.begin(), cons.end(), Construction::kFile) == cons.end())
    cons.push_back(Construction::kFile);

  const Eigen::Index n = static_cast<Eigen::Index>(s.signal_dim);
  const std::vector<int> ks = k_grid(s.k_lo, s.k_hi, s.k_step);
  const std::vector<std::uint64_t> primes = odd_primes(s.p_lo, s.p_hi, s.max_primes);

  std::vector<FixedOperator> fixed;
  std::vector<CellDef> defs;
  for (Construction c : cons) {
    if (c == Construction::kChirp)
      throw std::invalid_argument("chirp frames are complex; recovery here is real");
    for (std::uint64_t p : primes) {
      const PrimeModulus pm(p);
      const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
      CellDef d;
      d.c = c;
      d.prime = p;
      if (per_trial_matrix(c)) {
        d.p = p;
        d.m = m;
      } else {
        fixed.push_back(make_fixed_operator(c, p, m, n, s));
        d.p = c == Construction::kFile ? fixed.back().ambient : p;
        d.m = fixed.back().rows;
        d.fixed_op = fixed.back().op;
      }
      for (int k : ks) {
        d.k = k;
        defs.push_back(d);
      }
    }
  }
  return run_cells(s, kStreamExp2, defs, n);
}

SuccessCurves exp3_success_vs_p(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) s.p_lo = 41;
  if (s.p_hi == 0) s.p_hi = 293;
  if (s.k_lo == 0 && s.k_hi == 0) {
    s.k_lo = 10;
    s.k_hi = 20;
    s.k_step = 10;
  }
  if (s.k_hi == 0) s.k_hi = s.k_lo;
  if (s.signal_dim == 0) s.signal_dim = 40;
  s.floor_rows = true;  // this sweep is defined with floor-rounded rows
  std::vector<Construction> cons = s.constructions;
  if (cons.empty()) cons = {Construction::kLegendre, Construction::kBernoulli};

  const Eigen::Index n = static_cast<Eigen::Index>(s.signal_dim);
  if (static_cast<Eigen::Index>(s.k_hi) > n)
    throw std::invalid_argument("sparsity level outside [1, signal dimension]");
  const std::vector<int> ks = k_grid(s.k_lo, s.k_hi, s.k_step);
  const std::vector<std::uint64_t> primes = odd_primes(s.p_lo, s.p_hi, s.max_primes);

  std::vector<FixedOperator> fixed;
  std::vector<CellDef> defs;
  for (Construction c : cons) {
    if (c == Construction::kChirp)
      throw std::invalid_argument("chirp frames are complex; recovery here is real");
    if (c == Construction::kFile)
      throw std::invalid_argument("a fixed file matrix cannot sweep the prime axis");
    for (int k : ks) {
      for (std::uint64_t p : primes) {
        const PrimeModulus pm(p);
        const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, Rounding::kFloor);
        CellDef d;
        d.c = c;
        d.prime = p;
        d.p = p;
        d.m = m;
        d.k = k;
        if (!per_trial_matrix(c)) {
          fixed.push_back(make_fixed_operator(c, p, m, n, s));
          d.m = fixed.back().rows;
          d.fixed_op = fixed.back().op;
        }
        defs.push_back(d);
      }
    }
  }
  return run_cells(s, kStreamExp3, defs, n);
}

std::string SparsityLevels::csv() const {
  std::string s = "p,m,g,comparator\n";
  for (const Row& r : rows) {
    s += std::to_string(r.p);
    s += ',';
    s += std::to_string(r.m);
    s += ',';
    s += std::to_string(r.g);
    s += ',';
    s += fmt17(r.comparator);
    s += '\n';
  }
  if (has_slope) {
    s += "# slope,";
    s += fmt17(slope);
    s += '\n';
  }
  return s;
}

SparsityLevels exp4_max_sparsity(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) s.p_lo = 113;
  if (s.p_hi == 0) s.p_hi = 197;
  if (s.signal_dim == 0) s.signal_dim = 100;
  if (!s.constructions.empty() &&
      (s.constructions.size() != 1 || s.constructions[0] != Construction::kLegendre))
    throw std::invalid_argument("the sparsity-ceiling sweep is defined for legendre only");
  if (s.trials < 1) throw std::invalid_argument("trials must be positive");

  const std::vector<std::uint64_t> primes = odd_primes(s.p_lo, s.p_hi, s.max_primes);

  SparsityLevels out;
  for (std::uint64_t p : primes) {
    const PrimeModulus pm(p);
    const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
    // The signal support lives in the first signal_dim coordinates, but the
    // solve runs over the full p columns: the reference suboptimal rate this
    // sweep is compared against, m / log(n/m) = p^(3/4) / (ln(p)/4), is the
    // ambient-dimension one.
    const Eigen::Index n = static_cast<Eigen::Index>(p);
    const Eigen::Index support_dim =
        static_cast<Eigen::Index>(std::min<std::uint64_t>(s.signal_dim, p));
    const FixedOperator fixed = make_fixed_operator(Construction::kLegendre, p, m, n, s);

    int g = 0;
    for (int k = 1; static_cast<Eigen::Index>(k) <= support_dim; ++k) {
      std::vector<double> snrs(s.trials, 0.0);
      std::vector<std::uint8_t> conv(s.trials, 1);
      bool failed = false;
      std::string error;
#pragma omp parallel for schedule(dynamic)
      for (int trial = 0; trial < s.trials; ++trial) {
        if (failed) continue;
        try {
          Rng cell_rng = Rng(s.seed)
                             .derive(kStreamExp4)
                             .derive(p)
                             .derive(static_cast<std::uint64_t>(k))
                             .derive(static_cast<std::uint64_t>(trial));
          Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
          x.head(support_dim) = sparse_gaussian(cell_rng.derive(kTagSignal), support_dim, k);
          const RecoveryResult res = basis_pursuit(*fixed.op, fixed.op->apply(x), s.solver);
          snrs[trial] = x.norm() == 0.0 ? (res.xhat.norm() == 0.0 ? 999.0 : 0.0)
                                        : snr_db(x, res.xhat);
          conv[trial] = res.converged ? 1 : 0;
        } catch (const std::exception& e) {
#pragma omp critical
          {
            if (!failed) {
              failed = true;
              error = e.what();
            }
          }
        }
      }
      if (failed) throw std::runtime_error(error);
      for (std::uint8_t cv : conv) out.any_nonconverged = out.any_nonconverged || !cv;
      const double worst = *std::min_element(snrs.begin(), snrs.end());
      if (worst > s.success_db)
        g = k;
      else
        break;
    }
    out.rows.push_back({p, m, g, std::pow(static_cast<double>(p), 0.75)});
  }

  std::vector<double> ps, gs;
  for (const auto& r : out.rows)
    if (r.g >= 1) {
      ps.push_back(static_cast<double>(r.p));
      gs.push_back(static_cast<double>(r.g));
    }
  if (ps.size() >= 2) {
    out.slope = loglog_slope(ps, gs);
    out.has_slope = true;
  }
  return out;
}

std::string QuantizedErrors::csv() const {
  std::string s = "p,m,k,r,delta,trials,median_err\n";
  for (const Row& r : rows) {
    s += std::to_string(r.p);
    s += ',';
    s += std::to_string(r.m);
    s += ',';
    s += std::to_string(r.k);
    s += ',';
    s += std::to_string(r.r);
    s += ',';
    s += fmt17(r.delta);
    s += ',';
    s += std::to_string(r.trials);
    s += ',';
    s += fmt17(r.median_err);
    s += '\n';
  }
  return s;
}

QuantizedErrors exp_quantized(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) s.p_lo = 127;
  if (s.p_hi == 0) s.p_hi = 887;
  if (s.max_primes == 0) s.max_primes = 5;
  if (s.k_lo == 0) s.k_lo = 5;
  if (s.trials < 1) throw std::invalid_argument("trials must be positive");
  if (s.r > 3) throw std::invalid_argument("difference order must be in 0..3");
  if (s.delta <= 0) throw std::invalid_argument("quantizer step must be positive");

  const std::vector<std::uint64_t> primes = odd_primes(s.p_lo, s.p_hi, s.max_primes);

  QuantizedErrors out;
  for (std::uint64_t p : primes) {
    const PrimeModulus pm(p);
    const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
    const Eigen::Index n =
        static_cast<Eigen::Index>(s.signal_dim == 0 ? p : s.signal_dim);
    const FixedOperator fixed = make_fixed_operator(Construction::kLegendre, p, m, n, s);
    const PreprocessedFrame frame = svd_preprocess(m, s.r);

    std::vector<double> errs(s.trials, 0.0);
    bool any_bad = false;
    bool failed = false;
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < s.trials; ++trial) {
      if (failed) continue;
      try {
        Rng cell_rng = Rng(s.seed)
                           .derive(kStreamExpQ)
                           .derive(p)
                           .derive(static_cast<std::uint64_t>(s.k_lo))
                           .derive(static_cast<std::uint64_t>(trial));
        const Eigen::VectorXd x = sparse_gaussian(cell_rng.derive(kTagSignal), n, s.k_lo);
        Eigen::VectorXd noise;
        const Eigen::VectorXd* noise_ptr = nullptr;
        if (s.epsilon > 0) {
          Rng nrng = cell_rng.derive(kTagNoise);
          noise.resize(static_cast<Eigen::Index>(m));
          for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = nrng.next_gaussian();
          // Half the allowed radius: well inside the stated noise budget.
          noise *= 0.5 * s.epsilon * std::sqrt(static_cast<double>(m)) / noise.norm();
          noise_ptr = &noise;
        }
        const OneStageData data = assemble_one_stage(*fixed.op, frame, x, s.r, s.delta,
                                                     s.levels, s.epsilon, noise_ptr);
        const RecoveryResult res = one_stage_recover(data.effective, data.q, s.r, s.delta,
                                                     data.c_r, s.epsilon, s.solver);
        errs[trial] = (x - res.xhat).norm();
        if (!res.converged) {
#pragma omp critical
          any_bad = true;
        }
      } catch (const std::exception& e) {
#pragma omp critical
        {
          if (!failed) {
            failed = true;
            error = e.what();
          }
        }
      }
    }
    if (failed) throw std::runtime_error(error);
    out.any_nonconverged = out.any_nonconverged || any_bad;
    out.rows.push_back({p, m, s.k_lo, s.r, s.delta, s.trials, median_of(errs)});
  }
  return out;
}

std::string TrialTable::csv() const {
  std::string s = "trial,k,p,m,snr_db,success,iterations\n";
  for (const Row& r : rows) {
    s += std::to_string(r.trial);
    s += ',';
    s += std::to_string(r.k);
    s += ',';
    s += std::to_string(r.p);
    s += ',';
    s += std::to_string(r.m);
    s += ',';
    s += fmt6(r.snr_db);
    s += ',';
    s += std::to_string(r.success ? 1 : 0);
    s += ',';
    s += std::to_string(r.iterations);
    s += '\n';
  }
  return s;
}

TrialTable recover_trials(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) throw std::invalid_argument("a prime is required");
  if (s.k_lo == 0) s.k_lo = 5;
  if (s.trials < 1) throw std::invalid_argument("trials must be positive");
  const Construction c = s.constructions.empty() ? Construction::kLegendre : s.constructions[0];
  if (c == Construction::kChirp)
    throw std::invalid_argument("chirp frames are complex; recovery here is real");

  const std::uint64_t p = s.p_lo;
  const PrimeModulus pm(p);
  std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
  std::uint64_t ambient = p;
  if (c == Construction::kDevore) {
    // The prime itself is the alphabet base here: q^2 rows, q^3 columns.
    m = p * p;
    ambient = p * p * p;
  } else if (c == Construction::kFile) {
    if (s.matrix_file.empty())
      throw std::invalid_argument("file construction requested without a matrix file");
    const LoadedMatrix lm = load_matrix(s.matrix_file);
    if (lm.is_complex)
      throw std::invalid_argument("complex matrices are not usable for real recovery");
    m = static_cast<std::uint64_t>(lm.rows());
    ambient = static_cast<std::uint64_t>(lm.cols());
  }
  const Eigen::Index n =
      static_cast<Eigen::Index>(s.signal_dim == 0 ? ambient : s.signal_dim);
  if (s.k_lo < 1 || static_cast<Eigen::Index>(s.k_lo) > n)
    throw std::invalid_argument("sparsity level outside [1, signal dimension]");
  FixedOperator fixed;
  if (!per_trial_matrix(c)) {
    fixed = make_fixed_operator(c, p, m, n, s);
    m = fixed.rows;
  }

  TrialTable out;
  out.rows.resize(s.trials);
  bool failed = false;
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < s.trials; ++trial) {
    if (failed) continue;
    try {
      Rng cell_rng = Rng(s.seed)
                         .derive(kStreamRecover)
                         .derive(p)
                         .derive(static_cast<std::uint64_t>(s.k_lo))
                         .derive(static_cast<std::uint64_t>(trial));
      const Eigen::VectorXd x = sparse_gaussian(cell_rng.derive(kTagSignal), n, s.k_lo);
      RecoveryResult res;
      if (fixed.op) {
        res = basis_pursuit(*fixed.op, fixed.op->apply(x), s.solver);
      } else {
        const DenseOperator a = make_trial_operator(c, p, m, n, cell_rng.derive(kTagMatrix));
        res = basis_pursuit(a, a.apply(x), s.solver);
      }
      TrialTable::Row row;
      row.trial = trial;
      row.k = s.k_lo;
      row.p = c == Construction::kFile ? ambient : p;
      row.m = m;
      row.snr_db = x.norm() == 0.0 ? (res.xhat.norm() == 0.0 ? 999.0 : 0.0)
                                   : snr_db(x, res.xhat);
      row.success = is_success(x, res.xhat, s.success_db);
      row.iterations = res.iterations;
      out.rows[trial] = row;
      if (!res.converged) {
#pragma omp critical
        out.any_nonconverged = true;
      }
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          error = e.what();
        }
      }
    }
  }
  if (failed) throw std::runtime_error(error);
  return out;
}

std::string QuantizeTable::csv() const {
  std::string s = QuantizationRun::csv_header();
  s += '\n';
  for (const QuantizationRun& r : runs) {
    s += r.csv_row();
    s += '\n';
  }
  return s;
}

QuantizeTable quantize_runs(const ExperimentSpec& spec) {
  ExperimentSpec s = spec;
  if (s.p_lo == 0) throw std::invalid_argument("a prime is required");
  if (s.k_lo == 0) s.k_lo = 5;
  if (s.trials < 1) throw std::invalid_argument("trials must be positive");
  if (s.r > 3) throw std::invalid_argument("difference order must be in 0..3");
  if (s.delta <= 0) throw std::invalid_argument("quantizer step must be positive");

  const std::uint64_t p = s.p_lo;
  const PrimeModulus pm(p);
  const std::uint64_t m = row_count(pm, s.alpha_num, s.alpha_den, rounding_of(s));
  const Eigen::Index n = static_cast<Eigen::Index>(s.signal_dim == 0 ? p : s.signal_dim);
  if (s.k_lo < 1 || static_cast<Eigen::Index>(s.k_lo) > n)
    throw std::invalid_argument("sparsity level outside [1, signal dimension]");
  const FixedOperator fixed = make_fixed_operator(Construction::kLegendre, p, m, n, s);
  const PreprocessedFrame frame = svd_preprocess(m, s.r);

  QuantizeTable out;
  out.runs.resize(s.trials);
  bool failed = false;
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < s.trials; ++trial) {
    if (failed) continue;
    try {
      Rng cell_rng = Rng(s.seed)
                         .derive(kStreamQuantize)
                         .derive(p)
                         .derive(static_cast<std::uint64_t>(s.k_lo))
                         .derive(static_cast<std::uint64_t>(trial));
      const Eigen::VectorXd x = sparse_gaussian(cell_rng.derive(kTagSignal), n, s.k_lo);
      OneStageData data =
          assemble_one_stage(*fixed.op, frame, x, s.r, s.delta, s.levels, 0.0, nullptr);
      out.runs[trial] = std::move(data.run);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          error = e.what();
        }
      }
    }
  }
  if (failed) throw std::runtime_error(error);
  return out;
}

void render_matrix(const ExperimentSpec& spec, const std::string& path) {
  if (spec.p_lo == 0) throw std::invalid_argument("a prime is required");
  const PrimeModulus pm(spec.p_lo);
  const std::uint64_t m = row_count(pm, spec.alpha_num, spec.alpha_den, rounding_of(spec));
  const PartialCirculantMatrix mat = legendre_partial_circulant_rows(pm, m);
  save_sign_bitmap(to_dense(mat), path);
}

void generate_matrix(const ExperimentSpec& spec, const std::string& path) {
  if (spec.p_lo == 0) throw std::invalid_argument("a prime is required");
  const Construction c =
      spec.constructions.empty() ? Construction::kLegendre : spec.constructions[0];
  const PrimeModulus pm(spec.p_lo);
  const std::uint64_t p = spec.p_lo;
  const std::uint64_t m = row_count(pm, spec.alpha_num, spec.alpha_den, rounding_of(spec));
  const std::uint64_t n = spec.signal_dim == 0 ? p : spec.signal_dim;
  switch (c) {
    case Construction::kLegendre:
      save_matrix(to_dense(legendre_partial_circulant_rows(pm, m)), path);
      return;
    case Construction::kBernoulli:
      save_matrix(bernoulli_matrix(m, n, spec.seed), path);
      return;
    case Construction::kDevore:
      save_matrix(devore_matrix(pm, 2), path);
      return;
    case Construction::kChirp:
      save_matrix(chirp_matrix(pm), path);
      return;
    case Construction::kRandomLegendre: {
      const std::uint64_t x = Rng(spec.seed).derive(kStreamGen).derive(p).next_below(p);
      save_matrix(random_legendre_matrix(pm, m, n, x), path);
      return;
    }
    case Construction::kFile:
      throw std::invalid_argument("gen writes matrices; it does not copy files");
  }
}

}  // namespace lcs::harness
