#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace lcs {

// Counter-style SplitMix64 generator with cheap sub-stream derivation.
// Every (seed, id...) chain names an independent deterministic stream, so
// parallel trial loops can hand each cell its own generator up front and
// produce results that do not depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Child stream addressed by id; does not disturb this stream.
  Rng derive(std::uint64_t id) const {
    return Rng(mix(state_ + 0x9E3779B97F4A7C15ull * (id + 1)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [0, n). n must be nonzero.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t reject = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= reject) return x % n;
    }
  }

  // Standard normal via Box-Muller, one spare cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // k distinct indices from [0, n), ascending (Floyd's sampling).
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k) {
    std::vector<std::uint64_t> picked;
    picked.reserve(k);
    for (std::uint64_t j = n - k; j < n; ++j) {
      const std::uint64_t t = next_below(j + 1);
      bool seen = false;
      for (std::uint64_t v : picked) seen |= (v == t);
      picked.push_back(seen ? j : t);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lcs
