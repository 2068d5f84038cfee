#include <doctest.h>

#include <chrono>
#include <random>

#include "zwl/arith.hpp"
#include "zwl/error.hpp"

using namespace zwl;

namespace {

bool trial_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1;
  b %= m;
  if (b < 0) b += m;
  for (; e; e >>= 1, b = b * b % m)
    if (e & 1) r = r * b % m;
  return r;
}

int euler_legendre(std::int64_t a, std::int64_t p) {
  std::int64_t v = pow_mod(a, (p - 1) / 2, p);
  return v == 0 ? 0 : (v == 1 ? 1 : -1);
}

}  // namespace

TEST_SUITE("arith") {

TEST_CASE("primes_up_to small tables") {
  CHECK(primes_up_to(10).primes == std::vector<std::int64_t>{2, 3, 5, 7});
  CHECK(primes_up_to(1).primes.empty());
  CHECK(primes_up_to(0).primes.empty());
  CHECK(primes_up_to(1000).size() == 168);
}

TEST_CASE("primes_up_to agrees with trial division") {
  for (std::int64_t n : {2, 3, 97, 100, 1024, 9973, 10000}) {
    std::vector<std::int64_t> oracle;
    for (std::int64_t k = 2; k <= n; ++k)
      if (trial_prime(k)) oracle.push_back(k);
    CHECK(primes_up_to(n).primes == oracle);
  }
  auto table = primes_up_to(500);
  CHECK(table.contains(499));
  CHECK_FALSE(table.contains(497));
}

TEST_CASE("legendre examples") {
  CHECK(legendre(0, 5) == 0);
  CHECK(legendre(2, 7) == 1);
  CHECK(legendre(3, 7) == -1);
  CHECK(legendre(-1, 13) == 1);
  CHECK(legendre(-1, 11) == -1);
  CHECK_THROWS_AS(legendre(3, 2), Error);
  CHECK_THROWS_AS(legendre(3, 15), Error);
}

TEST_CASE("legendre matches Euler's criterion") {
  for (std::int64_t p : primes_up_to(400).primes) {
    if (p == 2) continue;
    for (std::int64_t a = -2 * p; a <= 2 * p; ++a) {
      REQUIRE(legendre(a, p) == euler_legendre(a, p));
      REQUIRE(legendre(a, p) == legendre(((a % p) + p) % p, p));
    }
  }
}

TEST_CASE("legendre is multiplicative") {
  std::mt19937_64 rng(11);
  auto primes = primes_up_to(5000).primes;
  for (int i = 0; i < 5000; ++i) {
    std::int64_t p = primes[1 + rng() % (primes.size() - 1)];
    std::int64_t a = static_cast<std::int64_t>(rng() % 1000000) - 500000;
    std::int64_t b = static_cast<std::int64_t>(rng() % 1000000) - 500000;
    if (a % p == 0 || b % p == 0) continue;
    REQUIRE(legendre(a * b, p) == legendre(a, p) * legendre(b, p));
  }
}

TEST_CASE("is_prime agrees with trial division and known large primes") {
  for (std::int64_t n = -5; n < 20000; ++n) REQUIRE(is_prime(BigInt(n)) == trial_prime(n));
  CHECK(is_prime(BigInt("18446744073709551557")));          // largest prime below 2^64
  CHECK(is_prime(BigInt("170141183460469231731687303715884105727")));  // 2^127 - 1
  CHECK_FALSE(is_prime(BigInt("18446744073709551557") * BigInt(3)));
  CHECK_FALSE(is_prime(BigInt(3215031751)));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST_CASE("factorize examples") {
  auto f = factorize(BigInt(12));
  CHECK(f.factors == std::vector<PrimePower>{{BigInt(2), 2}, {BigInt(3), 1}});
  auto g = factorize(BigInt(-64));
  CHECK(g.factors == std::vector<PrimePower>{{BigInt(2), 6}});
  CHECK(g.sign() == -1);
  CHECK(factorize(BigInt(1)).factors.empty());
  CHECK(factorize(BigInt(-1)).sign() == -1);
  CHECK_THROWS_AS(factorize(BigInt(0)), Error);
  try {
    factorize(BigInt(1) << 127);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("factorize recomposes and yields prime factors") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    BigInt n = BigInt(rng() >> (rng() % 60));
    if (i % 3 == 0) n *= BigInt(rng() >> 34);
    if (n == 0) continue;
    if (i % 2) n = -n;
    Factorization f = factorize(n);
    REQUIRE(f.recompose() == boost::multiprecision::abs(n));
    for (std::size_t k = 0; k < f.factors.size(); ++k) {
      REQUIRE(is_prime(f.factors[k].prime));
      if (k) REQUIRE(f.factors[k - 1].prime < f.factors[k].prime);
    }
  }
}

TEST_CASE("factorize splits products of large primes") {
  const BigInt p("1000000000039");
  const BigInt q("999999999989");
  const BigInt r("18446744073709551557");
  Factorization f = factorize(p * q);
  CHECK(f.factors == std::vector<PrimePower>{{q, 1}, {p, 1}});
  Factorization g = factorize(BigInt(4) * r * BigInt(7));
  CHECK(g.factors == std::vector<PrimePower>{{BigInt(2), 2}, {BigInt(7), 1}, {r, 1}});
  const BigInt big_a("1125899906842597"), big_b("1125899906842589");  // 2^50 - 27, 2^50 - 35
  CHECK(factorize(big_a * big_b).factors == std::vector<PrimePower>{{big_b, 1}, {big_a, 1}});
  Factorization h = factorize(p * p * q);
  CHECK(h.ord(p) == 2);
  CHECK(h.ord(q) == 1);
  CHECK(radical(h) == p * q);
}

TEST_CASE("factorize is fast at desk-scale discriminants") {
  std::mt19937_64 rng(3);
  const int count = 2000;
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < count; ++i) factorize(BigInt(680000000 + static_cast<std::int64_t>(rng() % 100000000)));
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(ms / count < 1.0);
}

TEST_CASE("poly_eval") {
  std::vector<BigInt> t{0, 1};
  CHECK(poly_eval(t, BigInt(7)) == 7);
  std::vector<BigInt> disc{-64, 0, -432};  // -16(4 + 27 T^2)
  CHECK(poly_eval(disc, BigInt(10)) == -43264);
  CHECK(poly_eval(std::vector<BigInt>{}, BigInt(5)) == 0);
  std::vector<BigInt> big{1, 0, 0, 0, 0, 1};
  CHECK(poly_eval(big, BigInt("100000000000")) == BigInt("10000000000000000000000000000000000000000000000000000001"));
}

TEST_CASE("mod_small") {
  CHECK(mod_small(BigInt(-1), 7) == 6);
  CHECK(mod_small(BigInt("-100000000000000000000"), 13) == ((13 - BigInt("100000000000000000000") % 13) % 13));
}

}
