#pragma once

#include <cstdint>
#include <vector>

namespace lcs {

// Deterministic primality test, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) noexcept;

// All primes in [lo, hi], ascending.
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

// An odd prime modulus, validated once at construction.
// Throws std::invalid_argument if p is not an odd prime >= 3.
class PrimeModulus {
 public:
  explicit PrimeModulus(std::uint64_t p);
  std::uint64_t value() const noexcept { return p_; }

 private:
  std::uint64_t p_;
};

// (a | p) via Euler's criterion: 0 if p divides a, else +1 for quadratic
// residues and -1 for non-residues. Negative a is reduced mod p first.
int legendre_symbol(std::int64_t a, const PrimeModulus& p) noexcept;

// ceil(p^(num/den)) and floor(p^(num/den)), computed exactly over integers
// (p^num must fit in unsigned 128 bits, otherwise std::overflow_error).
// num and den must be positive.
std::uint64_t ceil_pow_frac(std::uint64_t p, unsigned num, unsigned den);
std::uint64_t floor_pow_frac(std::uint64_t p, unsigned num, unsigned den);

}  // namespace lcs
