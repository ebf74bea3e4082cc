#include "lcs/numtheory.hpp"

#include <stdexcept>

namespace lcs {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) noexcept { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) noexcept {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Returns false when w proves n composite. n odd, n - 1 = d * 2^s.
bool strong_probable_prime(u64 n, u64 d, int s, u64 w) noexcept {
  w %= n;
  if (w == 0) return true;
  u64 x = powmod(w, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(u64 n) noexcept {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set decides primality for every n < 2^64.
  for (u64 w : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (!strong_probable_prime(n, d, s, w)) return false;
  }
  return true;
}

std::vector<u64> primes_in_range(u64 lo, u64 hi) {
  std::vector<u64> out;
  for (u64 n = lo; n <= hi && n >= lo; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

PrimeModulus::PrimeModulus(u64 p) : p_(p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("PrimeModulus: p must be an odd prime >= 3");
}

int legendre_symbol(std::int64_t a, const PrimeModulus& p) noexcept {
  const u64 q = p.value();
  std::int64_t r = a % static_cast<std::int64_t>(q);
  if (r < 0) r += static_cast<std::int64_t>(q);
  if (r == 0) return 0;
  const u64 e = powmod(static_cast<u64>(r), (q - 1) / 2, q);
  return e == 1 ? 1 : -1;
}

namespace {

constexpr u128 kU128Max = ~u128(0);

u128 checked_pow(u64 base, unsigned exp) {
  u128 r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > kU128Max / base) throw std::overflow_error("pow_frac: p^num exceeds 128 bits");
    r *= base;
  }
  return r;
}

// pow(r, den) capped so it never overflows: returns kU128Max when the true
// value would exceed it. Safe for comparisons against target <= kU128Max.
u128 capped_pow(u128 r, unsigned den) {
  u128 v = 1;
  for (unsigned i = 0; i < den; ++i) {
    if (r != 0 && v > kU128Max / r) return kU128Max;
    v *= r;
  }
  return v;
}

// Largest r with r^den <= target.
u128 floor_root(u128 target, unsigned den) {
  u128 lo = 0, hi = 1;
  while (capped_pow(hi, den) <= target && capped_pow(hi, den) != kU128Max) hi <<= 1;
  if (capped_pow(hi, den) == target) return hi;
  // Invariant: lo^den <= target < hi^den.
  while (hi - lo > 1) {
    u128 mid = lo + (hi - lo) / 2;
    if (capped_pow(mid, den) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

std::uint64_t floor_pow_frac(u64 p, unsigned num, unsigned den) {
  if (num == 0 || den == 0) throw std::invalid_argument("pow_frac: num and den must be positive");
  const u128 target = checked_pow(p, num);
  const u128 r = floor_root(target, den);
  if (r > kU128Max >> 64) throw std::overflow_error("pow_frac: result exceeds 64 bits");
  return static_cast<u64>(r);
}

std::uint64_t ceil_pow_frac(u64 p, unsigned num, unsigned den) {
  if (num == 0 || den == 0) throw std::invalid_argument("pow_frac: num and den must be positive");
  const u128 target = checked_pow(p, num);
  const u128 r = floor_root(target, den);
  const u128 up = (capped_pow(r, den) == target) ? r : r + 1;
  if (up > kU128Max >> 64) throw std::overflow_error("pow_frac: result exceeds 64 bits");
  return static_cast<u64>(up);
}

}  // namespace lcs
