#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace zwl {

using BigInt = boost::multiprecision::cpp_int;

/// Ascending list of all primes not exceeding `limit`.
struct PrimeTable {
  std::int64_t limit = 0;
  std::vector<std::int64_t> primes;

  std::size_t size() const { return primes.size(); }
  bool contains(std::int64_t n) const;
};

struct PrimePower {
  BigInt prime;
  int exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Factorization of |value|; the sign of `value` is kept but never factored.
struct Factorization {
  BigInt value;
  std::vector<PrimePower> factors;  // distinct primes, ascending

  int sign() const { return value < 0 ? -1 : (value > 0 ? 1 : 0); }
  /// Exponent of `p` in |value| (0 when absent).
  int ord(const BigInt& p) const;
  /// Product of prime^exponent; equals |value|.
  BigInt recompose() const;
};

/// Sieve of Eratosthenes. limit < 2 gives an empty table.
PrimeTable primes_up_to(std::int64_t limit);

/// Legendre symbol (a/p) by quadratic reciprocity descent.
/// Throws InvalidArgument unless p is an odd prime.
int legendre(std::int64_t a, std::int64_t p);

/// Same as legendre() without validating p. For inner loops over a
/// PrimeTable where p is known to be an odd prime.
int legendre_unchecked(std::int64_t a, std::int64_t p);

/// Deterministic for n < 3.3e24; strong probable-prime test above that.
bool is_prime(const BigInt& n);

/// Complete factorization of a nonzero integer with |n| < 2^127.
/// Throws Overflow outside that range and InvalidArgument for n = 0.
Factorization factorize(const BigInt& n);

/// Product of the distinct primes dividing n (n != 0).
BigInt radical(const Factorization& f);

/// Horner evaluation of sum coeffs[i] * t^i.
BigInt poly_eval(std::span<const BigInt> coeffs, const BigInt& t);

/// Nonnegative residue of n modulo m (m > 0).
std::int64_t mod_small(const BigInt& n, std::int64_t m);

}  // namespace zwl
