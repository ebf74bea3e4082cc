// Command line front end. Every subcommand writes CSV (or a matrix file) and
// exits 0 on success, 2 on any validation or input problem, 3 when results
// were produced but some solve did not certify convergence.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcs/harness.hpp"

namespace {

using lcs::harness::Construction;
using lcs::harness::ExperimentSpec;

struct SubOpts {
  ExperimentSpec spec;
  std::uint64_t p = 0;
  std::string p_range;
  int k = 0;
  std::string k_range;
  std::string alpha;
  std::vector<std::string> constructions;
  std::string out;
};

void split_on(const std::string& s, char sep, std::vector<std::string>& parts) {
  parts.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
}

std::uint64_t to_u64(const std::string& s, const char* what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (...) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument(std::string(what) + ": '" + s + "'");
  return v;
}

Construction parse_construction(const std::string& name, ExperimentSpec& spec) {
  if (name == "legendre") return Construction::kLegendre;
  if (name == "bernoulli") return Construction::kBernoulli;
  if (name == "devore") return Construction::kDevore;
  if (name == "chirp") return Construction::kChirp;
  if (name == "random-legendre") return Construction::kRandomLegendre;
  if (name.rfind("file:", 0) == 0) {
    const std::string path = name.substr(5);
    if (path.empty()) throw std::invalid_argument("file: construction needs a path");
    if (!spec.matrix_file.empty() && spec.matrix_file != path)
      throw std::invalid_argument("only one matrix file per run");
    spec.matrix_file = path;
    return Construction::kFile;
  }
  throw std::invalid_argument("unknown construction '" + name + "'");
}

// Fold the raw string options into the spec. Throws std::invalid_argument
// on anything malformed; the caller maps that to exit code 2.
void finalize(SubOpts& o) {
  std::vector<std::string> parts;
  if (o.p != 0) {
    o.spec.p_lo = o.p;
    o.spec.p_hi = o.p;
  }
  if (!o.p_range.empty()) {
    split_on(o.p_range, ':', parts);
    if (parts.size() != 2) throw std::invalid_argument("--p-range wants LO:HI");
    o.spec.p_lo = to_u64(parts[0], "--p-range low");
    o.spec.p_hi = to_u64(parts[1], "--p-range high");
    if (o.spec.p_lo > o.spec.p_hi) throw std::invalid_argument("--p-range: LO must be <= HI");
  }
  if (o.k != 0) {
    if (o.k < 0) throw std::invalid_argument("--k must be positive");
    o.spec.k_lo = o.k;
    o.spec.k_hi = o.k;
  }
  if (!o.k_range.empty()) {
    split_on(o.k_range, ':', parts);
    if (parts.size() != 2 && parts.size() != 3)
      throw std::invalid_argument("--k-range wants LO:HI or LO:HI:STEP");
    o.spec.k_lo = static_cast<int>(to_u64(parts[0], "--k-range low"));
    o.spec.k_hi = static_cast<int>(to_u64(parts[1], "--k-range high"));
    o.spec.k_step = parts.size() == 3 ? static_cast<int>(to_u64(parts[2], "--k-range step")) : 1;
    if (o.spec.k_lo < 1 || o.spec.k_hi < o.spec.k_lo || o.spec.k_step < 1)
      throw std::invalid_argument("--k-range: need 1 <= LO <= HI and STEP >= 1");
  }
  if (!o.alpha.empty()) {
    split_on(o.alpha, '/', parts);
    if (parts.size() != 2) throw std::invalid_argument("--alpha wants NUM/DEN");
    o.spec.alpha_num = static_cast<unsigned>(to_u64(parts[0], "--alpha numerator"));
    o.spec.alpha_den = static_cast<unsigned>(to_u64(parts[1], "--alpha denominator"));
  }
  for (const std::string& name : o.constructions)
    o.spec.constructions.push_back(parse_construction(name, o.spec));
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::invalid_argument("cannot open output file '" + out + "'");
  f << text;
  if (!f) throw std::invalid_argument("write failed for '" + out + "'");
}

void add_prime_opts(CLI::App* cmd, SubOpts& o, bool with_range) {
  auto* p = cmd->add_option("--p", o.p, "odd prime modulus");
  if (with_range) {
    auto* pr = cmd->add_option("--p-range", o.p_range, "inclusive prime range LO:HI");
    p->excludes(pr);
    pr->excludes(p);
  }
  cmd->add_option("--alpha", o.alpha, "row exponent NUM/DEN (default 3/4)");
  cmd->add_flag("--floor-m", o.spec.floor_rows, "round the row count down instead of up");
}

void add_sparsity_opts(CLI::App* cmd, SubOpts& o, bool with_range) {
  auto* k = cmd->add_option("--k", o.k, "sparsity level");
  if (with_range) {
    auto* kr = cmd->add_option("--k-range", o.k_range, "sparsity grid LO:HI[:STEP]");
    k->excludes(kr);
    kr->excludes(k);
  }
}

void add_trial_opts(CLI::App* cmd, SubOpts& o) {
  cmd->add_option("--trials", o.spec.trials, "trials per cell")->capture_default_str();
  cmd->add_option("--seed", o.spec.seed, "root seed for all derived streams")
      ->capture_default_str();
  cmd->add_option("--success-db", o.spec.success_db,
                  "norm-ratio dB threshold a trial must exceed")
      ->capture_default_str();
}

void add_construction_opt(CLI::App* cmd, SubOpts& o) {
  cmd->add_option("--construction", o.constructions,
                  "legendre | bernoulli | devore | chirp | random-legendre | file:<path>; "
                  "repeatable");
}

void add_quantize_opts(CLI::App* cmd, SubOpts& o) {
  cmd->add_option("--r", o.spec.r, "noise-shaping order (0 = plain rounding)")
      ->capture_default_str();
  cmd->add_option("--delta", o.spec.delta, "quantizer step")->capture_default_str();
  cmd->add_option("--levels", o.spec.levels, "alphabet levels per side (0 = auto)")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.spec.epsilon, "per-measurement noise scale")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic binary measurement matrices from quadratic residues: "
               "construction, coherence reports, sparse recovery, quantization"};
  app.require_subcommand(1);

  SubOpts gen_o, render_o, coh_o, rec_o, quant_o, e1_o, e2_o, e3_o, e4_o, eq_o;

  CLI::App* gen = app.add_subcommand("gen", "materialize a measurement matrix to a text file");
  add_prime_opts(gen, gen_o, false);
  gen->get_option("--p")->required();
  add_construction_opt(gen, gen_o);
  gen->add_option("--n", gen_o.spec.signal_dim, "columns for the random families (default p)");
  gen->add_option("--seed", gen_o.spec.seed, "seed for the random families")
      ->capture_default_str();
  gen->add_option("--out", gen_o.out, "output path")->required();

  CLI::App* render = app.add_subcommand("render", "sign-pattern bitmap (PBM) of the section");
  add_prime_opts(render, render_o, false);
  render->get_option("--p")->required();
  render->add_option("--out", render_o.out, "output path")->required();

  CLI::App* coh = app.add_subcommand("coherence", "coherence report for one or more primes");
  add_prime_opts(coh, coh_o, true);
  add_construction_opt(coh, coh_o);
  coh->add_option("--seed", coh_o.spec.seed, "seed (random families only)")
      ->capture_default_str();
  coh->add_option("--out", coh_o.out, "output CSV path (default stdout)");

  CLI::App* rec = app.add_subcommand("recover", "per-trial sparse recovery at one (p, k)");
  add_prime_opts(rec, rec_o, false);
  rec->get_option("--p")->required();
  add_sparsity_opts(rec, rec_o, false);
  add_trial_opts(rec, rec_o);
  add_construction_opt(rec, rec_o);
  rec->add_option("--n", rec_o.spec.signal_dim, "signal dimension (default: all columns)");
  rec->add_option("--out", rec_o.out, "output CSV path (default stdout)");

  CLI::App* quant = app.add_subcommand("quantize", "quantizer state statistics per trial");
  add_prime_opts(quant, quant_o, false);
  quant->get_option("--p")->required();
  add_sparsity_opts(quant, quant_o, false);
  add_trial_opts(quant, quant_o);
  add_quantize_opts(quant, quant_o);
  quant->add_option("--n", quant_o.spec.signal_dim, "signal dimension (default p)");
  quant->add_option("--out", quant_o.out, "output CSV path (default stdout)");

  CLI::App* e1 = app.add_subcommand("exp1", "coherence sweep across primes (default 71..1193)");
  add_prime_opts(e1, e1_o, true);
  add_construction_opt(e1, e1_o);
  e1->add_option("--seed", e1_o.spec.seed, "seed (random families only)")
      ->capture_default_str();
  e1->add_option("--max-primes", e1_o.spec.max_primes, "evenly thin the prime list (0 = all)");
  e1->add_option("--out", e1_o.out, "output CSV path (default stdout)");

  CLI::App* e2 = app.add_subcommand(
      "exp2", "success fraction vs sparsity at fixed size (default p 997, k 2..102)");
  add_prime_opts(e2, e2_o, false);
  add_sparsity_opts(e2, e2_o, true);
  add_trial_opts(e2, e2_o);
  add_construction_opt(e2, e2_o);
  e2->add_option("--n", e2_o.spec.signal_dim, "signal dimension (default 300)");
  e2->add_option("--out", e2_o.out, "output CSV path (default stdout)");

  CLI::App* e3 = app.add_subcommand(
      "exp3", "success fraction vs prime at fixed sparsity (default 41..293, k 10 and 20)");
  add_prime_opts(e3, e3_o, true);
  add_sparsity_opts(e3, e3_o, true);
  add_trial_opts(e3, e3_o);
  add_construction_opt(e3, e3_o);
  e3->add_option("--n", e3_o.spec.signal_dim, "signal dimension (default 40)");
  e3->add_option("--max-primes", e3_o.spec.max_primes, "evenly thin the prime list (0 = all)");
  e3->add_option("--out", e3_o.out, "output CSV path (default stdout)");

  CLI::App* e4 = app.add_subcommand(
      "exp4", "highest recoverable sparsity per prime (default 113..197)");
  add_prime_opts(e4, e4_o, true);
  add_trial_opts(e4, e4_o);
  e4->add_option("--n", e4_o.spec.signal_dim, "signal dimension (default 100)");
  e4->add_option("--max-primes", e4_o.spec.max_primes, "evenly thin the prime list (0 = all)");
  e4->add_option("--out", e4_o.out, "output CSV path (default stdout)");

  CLI::App* eq = app.add_subcommand(
      "expq", "median recovery error from quantized measurements across primes");
  add_prime_opts(eq, eq_o, true);
  add_sparsity_opts(eq, eq_o, false);
  eq_o.spec.trials = 20;
  eq_o.spec.r = 2;
  add_trial_opts(eq, eq_o);
  add_quantize_opts(eq, eq_o);
  eq->add_option("--n", eq_o.spec.signal_dim, "signal dimension (default p)");
  eq->add_option("--max-primes", eq_o.spec.max_primes, "evenly thin the prime list (default 5)");
  eq->add_option("--out", eq_o.out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      finalize(gen_o);
      lcs::harness::generate_matrix(gen_o.spec, gen_o.out);
      return 0;
    }
    if (*render) {
      finalize(render_o);
      lcs::harness::render_matrix(render_o.spec, render_o.out);
      return 0;
    }
    if (*coh) {
      finalize(coh_o);
      if (coh_o.spec.p_lo == 0) throw std::invalid_argument("coherence needs --p or --p-range");
      if (coh_o.spec.constructions.empty())
        coh_o.spec.constructions = {Construction::kLegendre};
      emit(lcs::harness::exp1_coherence_sweep(coh_o.spec).csv(), coh_o.out);
      return 0;
    }
    if (*rec) {
      finalize(rec_o);
      const lcs::harness::TrialTable t = lcs::harness::recover_trials(rec_o.spec);
      emit(t.csv(), rec_o.out);
      return t.any_nonconverged ? 3 : 0;
    }
    if (*quant) {
      finalize(quant_o);
      emit(lcs::harness::quantize_runs(quant_o.spec).csv(), quant_o.out);
      return 0;
    }
    if (*e1) {
      finalize(e1_o);
      emit(lcs::harness::exp1_coherence_sweep(e1_o.spec).csv(), e1_o.out);
      return 0;
    }
    if (*e2) {
      finalize(e2_o);
      const lcs::harness::SuccessCurves r = lcs::harness::exp2_success_vs_sparsity(e2_o.spec);
      emit(r.csv(), e2_o.out);
      return r.any_nonconverged ? 3 : 0;
    }
    if (*e3) {
      finalize(e3_o);
      const lcs::harness::SuccessCurves r = lcs::harness::exp3_success_vs_p(e3_o.spec);
      emit(r.csv(), e3_o.out);
      return r.any_nonconverged ? 3 : 0;
    }
    if (*e4) {
      finalize(e4_o);
      const lcs::harness::SparsityLevels r = lcs::harness::exp4_max_sparsity(e4_o.spec);
      emit(r.csv(), e4_o.out);
      return r.any_nonconverged ? 3 : 0;
    }
    if (*eq) {
      finalize(eq_o);
      const lcs::harness::QuantizedErrors r = lcs::harness::exp_quantized(eq_o.spec);
      emit(r.csv(), eq_o.out);
      return r.any_nonconverged ? 3 : 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
