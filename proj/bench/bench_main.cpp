// Timing comparison between the production kernels and the serial reference
// implementations: FFT matvec vs the O(mp) direct product, and the parallel
// sliding-window coherence scan vs the per-pair reference.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "lcs/analysis.hpp"
#include "lcs/circulant.hpp"
#include "lcs/reference.hpp"
#include "lcs/rng.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void bench_matvec(std::uint64_t p, int reps) {
  const lcs::PrimeModulus pm(p);
  const lcs::PartialCirculantMatrix mat = lcs::legendre_partial_circulant(pm);
  const lcs::CirculantOperator op(mat);

  lcs::Rng rng(7);
  Eigen::VectorXd x(static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.next_gaussian();

  Eigen::VectorXd sink = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mat.rows));
  auto t0 = clock_type::now();
  for (int i = 0; i < reps; ++i) sink += op.apply(x);
  const double fast = seconds_since(t0);

  t0 = clock_type::now();
  for (int i = 0; i < reps; ++i) sink += lcs::reference::matvec(mat, x);
  const double ref = seconds_since(t0);

  std::printf("matvec     p=%-6llu m=%-5llu reps=%-4d fft=%8.4fs direct=%8.4fs speedup=%6.2fx"
              " (checksum %.3e)\n",
              static_cast<unsigned long long>(p), static_cast<unsigned long long>(mat.rows),
              reps, fast, ref, ref / fast, sink.sum());
}

void bench_coherence(std::uint64_t p) {
  const lcs::PrimeModulus pm(p);
  const lcs::PartialCirculantMatrix mat = lcs::legendre_partial_circulant(pm);

  auto t0 = clock_type::now();
  const lcs::CoherenceReport fast = lcs::coherence(mat);
  const double window = seconds_since(t0);

  t0 = clock_type::now();
  const lcs::CoherenceReport ref = lcs::reference::coherence(mat);
  const double naive = seconds_since(t0);

  std::printf("coherence  p=%-6llu m=%-5llu window=%8.4fs  naive=%8.4fs speedup=%6.2fx"
              " (mu %.6f vs %.6f, argmax (%llu,%llu) vs (%llu,%llu))\n",
              static_cast<unsigned long long>(p), static_cast<unsigned long long>(mat.rows),
              window, naive, naive / window, fast.mu, ref.mu,
              static_cast<unsigned long long>(fast.argmax_a),
              static_cast<unsigned long long>(fast.argmax_b),
              static_cast<unsigned long long>(ref.argmax_a),
              static_cast<unsigned long long>(ref.argmax_b));
}

}  // namespace

int main(int argc, char** argv) {
  // Optional override: bench [p_matvec] [p_coherence]
  const std::uint64_t pm_big = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 9973;
  const std::uint64_t pc_big = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1193;

  bench_matvec(997, 200);
  bench_matvec(pm_big, 200);
  bench_coherence(499);
  bench_coherence(pc_big);
  return 0;
}
