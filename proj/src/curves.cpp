#include "zwl/curves.hpp"

#include <string>

#include "zwl/error.hpp"

namespace zwl {

namespace {

void require_prime_above_3(std::int64_t p, const char* who) {
  if (p <= 3 || !is_prime(BigInt(p)))
    fail(ErrorCode::InvalidArgument,
         std::string(who) + ": p = " + std::to_string(p) + " must be a prime > 3");
}

bool divides(const BigInt& d, const BigInt& n) { return n == 0 || n % d == 0; }

}  // namespace

std::string_view to_string(Reduction r) {
  switch (r) {
    case Reduction::Good: return "good";
    case Reduction::Multiplicative: return "multiplicative";
    case Reduction::Additive: return "additive";
  }
  return "unknown";
}

BigInt discriminant(const BigInt& a, const BigInt& b) {
  return -16 * (4 * a * a * a + 27 * b * b);
}

EllipticCurve::EllipticCurve(BigInt a, BigInt b)
    : a_(std::move(a)), b_(std::move(b)), disc_(discriminant(a_, b_)) {
  if (disc_ == 0)
    fail(ErrorCode::Singular, "singular curve: a = " + a_.str() + ", b = " + b_.str());
}

Reduction reduction_type(const EllipticCurve& curve, std::int64_t p) {
  require_prime_above_3(p, "reduction_type");
  if (mod_small(curve.disc(), p) != 0) return Reduction::Good;
  if (mod_small(curve.c4(), p) != 0) return Reduction::Multiplicative;
  return Reduction::Additive;
}

TraceRecord trace_of_frobenius(const EllipticCurve& curve, std::int64_t p) {
  require_prime_above_3(p, "trace_of_frobenius");
  const std::int64_t a = mod_small(curve.a(), p);
  const std::int64_t b = mod_small(curve.b(), p);
  int sum = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    std::int64_t v = ((x * x % p) * x + a * x + b) % p;
    sum += legendre_unchecked(v, p);
  }
  return {p, -sum, reduction_type(curve, p)};
}

EllipticCurve minimalize_at_p(const EllipticCurve& curve, std::int64_t p) {
  if (p < 5) fail(ErrorCode::InvalidArgument, "minimalize_at_p: p must be >= 5");
  const BigInt p4 = boost::multiprecision::pow(BigInt(p), 4);
  const BigInt p6 = boost::multiprecision::pow(BigInt(p), 6);
  BigInt a = curve.a();
  BigInt b = curve.b();
  // A nonsingular curve cannot have a = b = 0, so this terminates.
  while (divides(p4, a) && divides(p6, b)) {
    a /= p4;
    b /= p6;
  }
  return EllipticCurve(a, b);
}

MinimalModel minimalize(const EllipticCurve& curve) {
  BigInt g = boost::multiprecision::gcd(curve.a(), curve.b());
  BigInt a = curve.a();
  BigInt b = curve.b();
  BigInt scale = 1;
  if (g != 1) {
    for (const auto& pp : factorize(g).factors) {
      if (pp.prime < 5) continue;
      const BigInt p4 = boost::multiprecision::pow(pp.prime, 4);
      const BigInt p6 = boost::multiprecision::pow(pp.prime, 6);
      while (divides(p4, a) && divides(p6, b)) {
        a /= p4;
        b /= p6;
        scale *= pp.prime;
      }
    }
  }
  return {EllipticCurve(a, b), scale};
}

CharacterTable::CharacterTable(std::int64_t p) : p_(p), chi_(static_cast<std::size_t>(p), -1) {
  if (p <= 2) fail(ErrorCode::InvalidArgument, "CharacterTable: p must be an odd prime");
  chi_[0] = 0;
  for (std::int64_t x = 1; x <= p / 2; ++x) chi_[static_cast<std::size_t>(x * x % p)] = 1;
}

int CharacterTable::trace(std::int64_t a, std::int64_t b) const {
  const std::int64_t p = p_;
  int sum = 0;
  // v(x) = x^3 + a x + b, updated by finite differences.
  std::int64_t v = b;
  std::int64_t d1 = (1 + a) % p;   // v(1) - v(0)
  const std::int64_t six = 6 % p;
  std::int64_t d2 = six;           // second difference at x = 0
  for (std::int64_t x = 0; x < p; ++x) {
    sum += chi_[static_cast<std::size_t>(v)];
    v += d1;
    if (v >= p) v -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += six;
    if (d2 >= p) d2 -= p;
  }
  return -sum;
}

}  // namespace zwl
