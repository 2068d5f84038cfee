#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "zwl/arith.hpp"

namespace zwl {

enum class Reduction { Good, Multiplicative, Additive };

std::string_view to_string(Reduction r);

/// -16(4a^3 + 27b^2).
BigInt discriminant(const BigInt& a, const BigInt& b);

/// y^2 = x^3 + a x + b with nonzero discriminant.
class EllipticCurve {
 public:
  /// Throws Singular when the discriminant vanishes.
  EllipticCurve(BigInt a, BigInt b);

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& disc() const { return disc_; }
  /// c4 = -48a for a short Weierstrass model.
  BigInt c4() const { return -48 * a_; }

  friend bool operator==(const EllipticCurve&, const EllipticCurve&) = default;

 private:
  BigInt a_;
  BigInt b_;
  BigInt disc_;
};

struct TraceRecord {
  std::int64_t p = 0;
  int a_p = 0;
  Reduction reduction = Reduction::Good;
};

/// a_p = -sum_x (x^3+ax+b | p) = p - #affine points. Requires a prime p > 3
/// and a model minimal at p.
TraceRecord trace_of_frobenius(const EllipticCurve& curve, std::int64_t p);

Reduction reduction_type(const EllipticCurve& curve, std::int64_t p);

/// Divides out p^4 from a and p^6 from b while both divisibilities hold
/// (a zero coefficient passes vacuously). Requires p >= 5.
EllipticCurve minimalize_at_p(const EllipticCurve& curve, std::int64_t p);

/// Result of minimalizing at every prime p >= 5.
struct MinimalModel {
  EllipticCurve curve;
  BigInt scale;  // u with (a, b) = (u^4 a_min, u^6 b_min)
};

MinimalModel minimalize(const EllipticCurve& curve);

/// Quadratic character table for one odd prime: chi[r] = (r | p).
class CharacterTable {
 public:
  explicit CharacterTable(std::int64_t p);

  std::int64_t prime() const { return p_; }
  int operator[](std::int64_t r) const { return chi_[static_cast<std::size_t>(r)]; }

  /// -sum_x chi(x^3 + a x + b) for residues a, b in [0, p).
  int trace(std::int64_t a, std::int64_t b) const;

 private:
  std::int64_t p_;
  std::vector<std::int8_t> chi_;
};

}  // namespace zwl
