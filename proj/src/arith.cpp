#include "zwl/arith.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <string>

#include <boost/multiprecision/miller_rabin.hpp>

#include "zwl/error.hpp"

namespace zwl {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr std::int64_t kTrialLimit = 1'000'000;

const PrimeTable& trial_primes() {
  static const PrimeTable table = primes_up_to(kTrialLimit);
  return table;
}

u128 to_u128(const BigInt& n) {
  u128 out = 0;
  BigInt x = n;
  int shift = 0;
  while (x > 0) {
    out |= static_cast<u128>(static_cast<u64>(x & 0xFFFFFFFFFFFFFFFFull)) << shift;
    x >>= 64;
    shift += 64;
  }
  return out;
}

BigInt from_u128(u128 v) {
  BigInt out = static_cast<u64>(v >> 64);
  out <<= 64;
  out += static_cast<u64>(v);
  return out;
}

// Residues mod n < 2^64 with native 128-bit products.
struct PlainMod {
  u128 n;
  u128 mul(u128 a, u128 b) const { return a * b % n; }
  u128 to(u128 a) const { return a % n; }
};

// Montgomery residues mod an odd n < 2^127 with R = 2^128.
struct MontMod {
  u128 n;
  u128 ninv = 0;  // -n^{-1} mod 2^128
  u128 r2 = 0;    // R^2 mod n

  explicit MontMod(u128 modulus) : n(modulus) {
    u128 inv = n;
    for (int i = 0; i < 7; ++i) inv *= 2 - n * inv;
    ninv = -inv;
    u128 r = (0 - n) % n;
    r2 = r;
    for (int i = 0; i < 128; ++i) {
      r2 <<= 1;
      if (r2 >= n) r2 -= n;
    }
  }

  static void wide(u128 a, u128 b, u128& hi, u128& lo) {
    const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
    const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
    const u128 p00 = static_cast<u128>(a0) * b0, p01 = static_cast<u128>(a0) * b1;
    const u128 p10 = static_cast<u128>(a1) * b0, p11 = static_cast<u128>(a1) * b1;
    const u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
    lo = (mid << 64) | static_cast<u64>(p00);
    hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  }

  u128 mul(u128 a, u128 b) const {
    u128 hi, lo, qh, ql;
    wide(a, b, hi, lo);
    wide(lo * ninv, n, qh, ql);
    u128 t = hi + qh + (lo != 0 ? 1 : 0);
    return t >= n ? t - n : t;
  }
  u128 to(u128 a) const { return mul(a % n, r2); }
};

template <typename Mod>
u128 powmod(const Mod& mod, u128 base, u128 exp) {
  u128 result = mod.to(1);
  base = mod.to(base);
  while (exp > 0) {
    if (exp & 1) result = mod.mul(result, base);
    base = mod.mul(base, base);
    exp >>= 1;
  }
  return result;
}

template <typename Mod>
bool strong_probable_prime(const Mod& mod, u128 n) {
  static constexpr std::array<u64, 20> bases = {2,  3,  5,  7,  11, 13, 17,
                                                19, 23, 29, 31, 37, 41, 43,
                                                47, 53, 59, 61, 67, 71};
  u128 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  const u128 one = mod.to(1);
  const u128 minus_one = mod.to(n - 1);
  for (u64 a : bases) {
    u128 x = powmod(mod, a, d);
    if (x == one || x == minus_one) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mod.mul(x, x);
      if (x == minus_one) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool miller_rabin(u128 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n <= std::numeric_limits<u64>::max()) return strong_probable_prime(PlainMod{n}, n);
  return strong_probable_prime(MontMod(n), n);
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Brent's variant of Pollard rho; n is odd, composite and has no factor
// below the trial-division limit. Works on Montgomery residues for large n,
// which leaves the gcds unchanged because R is a unit.
template <typename Mod>
u128 pollard_brent(const Mod& mod, u128 n) {
  for (u128 c = 1;; ++c) {
    u128 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    constexpr u64 m = 128;
    auto step = [&](u128 v) {
      u128 w = mod.mul(v, v) + c;
      return w >= n ? w - n : w;
    };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = step(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = step(y);
          q = mod.mul(q, x > y ? x - y : y - x);
        }
        g = gcd128(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = gcd128(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

u128 pollard_brent(u128 n) {
  if (n <= std::numeric_limits<u64>::max()) return pollard_brent(PlainMod{n}, n);
  return pollard_brent(MontMod(n), n);
}

void split_large(u128 n, std::vector<u128>& out) {
  if (n == 1) return;
  if (miller_rabin(n)) {
    out.push_back(n);
    return;
  }
  u128 d = pollard_brent(n);
  split_large(d, out);
  split_large(n / d, out);
}

void push_factor(std::vector<PrimePower>& factors, const BigInt& p, int e) {
  for (auto& f : factors) {
    if (f.prime == p) {
      f.exponent += e;
      return;
    }
  }
  factors.push_back({p, e});
}

}  // namespace

bool PrimeTable::contains(std::int64_t n) const {
  return std::binary_search(primes.begin(), primes.end(), n);
}

int Factorization::ord(const BigInt& p) const {
  for (const auto& f : factors)
    if (f.prime == p) return f.exponent;
  return 0;
}

BigInt Factorization::recompose() const {
  BigInt out = 1;
  for (const auto& f : factors) out *= boost::multiprecision::pow(f.prime, static_cast<unsigned>(f.exponent));
  return out;
}

PrimeTable primes_up_to(std::int64_t limit) {
  PrimeTable table;
  table.limit = limit;
  if (limit < 2) return table;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 2; i * i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  for (std::int64_t i = 2; i <= limit; ++i)
    if (!composite[static_cast<std::size_t>(i)]) table.primes.push_back(i);
  return table;
}

int legendre_unchecked(std::int64_t a, std::int64_t p) {
  std::int64_t x = a % p;
  if (x < 0) x += p;
  std::int64_t n = p;
  int result = 1;
  while (x != 0) {
    while ((x & 1) == 0) {
      x >>= 1;
      std::int64_t r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, n);
    if ((x & 3) == 3 && (n & 3) == 3) result = -result;
    x %= n;
  }
  return n == 1 ? result : 0;
}

int legendre(std::int64_t a, std::int64_t p) {
  if (p <= 2 || !is_prime(BigInt(p)))
    fail(ErrorCode::InvalidArgument, "legendre: modulus " + std::to_string(p) + " is not an odd prime");
  return legendre_unchecked(a, p);
}

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  if (boost::multiprecision::msb(n) >= 127) {
    // From 2^127 on fall back to a probabilistic test.
    return boost::multiprecision::miller_rabin_test(n, 25);
  }
  return miller_rabin(to_u128(n));
}

Factorization factorize(const BigInt& n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "factorize: zero has no factorization");
  BigInt mag = boost::multiprecision::abs(n);
  if (boost::multiprecision::msb(mag) >= 127)
    fail(ErrorCode::Overflow, "factorize: |n| exceeds the 128-bit working range");

  Factorization out;
  out.value = n;
  u128 rest = to_u128(mag);
  const auto& primes = trial_primes().primes;

  std::size_t checkpoint = 64;
  for (std::size_t i = 0; i < primes.size() && rest > 1; ++i) {
    u64 p = static_cast<u64>(primes[i]);
    if (static_cast<u128>(p) * p > rest) break;
    int e = 0;
    if (rest <= std::numeric_limits<u64>::max()) {
      u64 r = static_cast<u64>(rest);
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      rest = r;
    } else {
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
    }
    if (e > 0) out.factors.push_back({BigInt(p), e});
    // A large prime cofactor would otherwise be trial divided all the way.
    if (i == checkpoint) {
      checkpoint *= 2;
      if (rest > 1 && miller_rabin(rest)) break;
    }
  }

  if (rest > 1) {
    auto limit = static_cast<u128>(kTrialLimit);
    if (rest < limit * limit || miller_rabin(rest)) {
      push_factor(out.factors, from_u128(rest), 1);
    } else {
      std::vector<u128> parts;
      split_large(rest, parts);
      for (u128 q : parts) push_factor(out.factors, from_u128(q), 1);
    }
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
  return out;
}

BigInt radical(const Factorization& f) {
  BigInt out = 1;
  for (const auto& pp : f.factors) out *= pp.prime;
  return out;
}

BigInt poly_eval(std::span<const BigInt> coeffs, const BigInt& t) {
  BigInt acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::int64_t mod_small(const BigInt& n, std::int64_t m) {
  BigInt r = n % m;
  auto v = static_cast<std::int64_t>(r);
  return v < 0 ? v + m : v;
}

}  // namespace zwl
