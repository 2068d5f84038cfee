#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zwl/arith.hpp"
#include "zwl/curves.hpp"

namespace zwl {

/// How p = 2 and p = 3 enter the conductor proxy.
enum class SmallPrimePolicy {
  IncludeOnce,  // log p once whenever p divides the minimal discriminant
  Exclude,
};

/// y^2 = x^3 + A(T) x + B(T) over Q(T) with sieve parameters.
struct FamilySpec {
  std::vector<BigInt> A;  // lowest degree first
  std::vector<BigInt> B;
  int rank = 0;
  std::int64_t sieve_c = 1;
  std::int64_t sieve_t0 = 0;
  BigInt fixed_square = 1;
  SmallPrimePolicy small_prime_policy = SmallPrimePolicy::IncludeOnce;
};

using Fingerprint = std::array<std::uint8_t, 32>;

/// Canonical JSON text of the spec; integer coefficients as strings.
std::string canonical_json(const FamilySpec& spec);
FamilySpec family_spec_from_json(const std::string& text);
Fingerprint fingerprint(const FamilySpec& spec);
std::string to_hex(const Fingerprint& fp);

/// A validated family with its derived polynomials.
class Family {
 public:
  /// Validates rank >= 0, sieve_c >= 1, fixed_square >= 1 and that the
  /// discriminant polynomial is not identically zero.
  explicit Family(FamilySpec spec);

  const FamilySpec& spec() const { return spec_; }
  /// Delta(T) = -16 (4 A^3 + 27 B^2).
  const std::vector<BigInt>& disc_poly() const { return disc_poly_; }
  /// D(T): primitive product of the distinct irreducible factors of Delta(T).
  const std::vector<BigInt>& squarefree_disc_poly() const { return squarefree_poly_; }
  int conductor_degree() const { return static_cast<int>(squarefree_poly_.size()) - 1; }
  const Fingerprint& fingerprint() const { return fingerprint_; }

  void set_conductor_overrides(std::map<std::int64_t, BigInt> overrides);
  const std::map<std::int64_t, BigInt>& conductor_overrides() const { return overrides_; }

  BigInt A_at(std::int64_t t) const;
  BigInt B_at(std::int64_t t) const;
  BigInt D_at(std::int64_t t) const;

 private:
  FamilySpec spec_;
  std::vector<BigInt> disc_poly_;
  std::vector<BigInt> squarefree_poly_;
  Fingerprint fingerprint_{};
  std::map<std::int64_t, BigInt> overrides_;
};

/// Square-free part of an integer polynomial, made primitive with positive
/// leading coefficient. Zero input is rejected.
std::vector<BigInt> squarefree_part(const std::vector<BigInt>& poly);

/// Curve at t, minimalized at every p >= 5. Throws Singular when Delta(t) = 0.
EllipticCurve specialize(const Family& family, std::int64_t t);
MinimalModel specialize_minimal(const Family& family, std::int64_t t);

struct SievedFamily {
  std::int64_t R = 0;
  std::vector<std::int64_t> members;           // ascending, within [R, 2R]
  std::map<BigInt, int> exponents;             // e_p for p | fixed_square
  std::int64_t singular_skipped = 0;
};

/// Exponents e_q of q | fixed_square from the first 32 admissible t of the
/// progression c t' + t0 (t >= 1). Throws SieveConfig when one varies.
std::map<BigInt, int> calibrate_exponents(const Family& family);

/// Membership rule for a factored value D(t).
bool sieve_admits(const Factorization& d_value, const BigInt& fixed_square,
                  const std::map<BigInt, int>& exponents);

SievedFamily sieve_family(const Family& family, std::int64_t R, int workers = 1);

/// Nonsingular t in [R, 2R] and the number of singular values skipped.
std::vector<std::int64_t> nonsingular_range(const Family& family, std::int64_t R,
                                            std::int64_t* singular_skipped = nullptr);

/// log N_t from the override table, else the radical of the minimal
/// discriminant over p > 3 plus the small-prime policy.
double log_conductor(const Family& family, std::int64_t t);

/// Mean of log_conductor over nonsingular t in [R, 2R].
double avg_log_conductor(const Family& family, std::int64_t R, int workers = 1);

/// CSV with header `t,conductor`.
std::map<std::int64_t, BigInt> load_conductor_overrides(const std::string& path);

/// Dense table of a_t(p) for members x primes (3 < p <= prime_limit).
struct TraceTable {
  std::vector<std::int64_t> members;
  std::vector<std::int64_t> primes;
  std::vector<std::int16_t> traces;  // row-major (member, prime)

  int at(std::size_t member, std::size_t prime) const {
    return traces[member * primes.size() + prime];
  }
  const std::int16_t* row(std::size_t member) const { return traces.data() + member * primes.size(); }
  friend bool operator==(const TraceTable&, const TraceTable&) = default;
};

/// Traces of the minimal models at t for all 3 < p <= prime_limit.
TraceTable build_trace_table(const Family& family, std::vector<std::int64_t> members,
                             std::int64_t prime_limit, int workers = 1);

enum class CacheScope : std::uint8_t { Sieved = 0, AllNonsingular = 1 };

struct TraceCache {
  Fingerprint family_fingerprint{};
  std::int64_t R = 0;
  std::int64_t prime_limit = 0;
  CacheScope scope = CacheScope::Sieved;
  std::int64_t build_time = 0;  // unix seconds
  TraceTable table;
};

TraceCache build_trace_cache(const Family& family, std::int64_t R, std::int64_t prime_limit,
                             CacheScope scope = CacheScope::Sieved, int workers = 1);
void save_trace_cache(const TraceCache& cache, const std::string& path);
/// Throws CacheCorrupt on bad magic, truncation or checksum mismatch.
TraceCache load_trace_cache(const std::string& path);
/// As above and throws CacheMismatch when the fingerprint differs.
TraceCache load_trace_cache(const std::string& path, const Family& family);

}  // namespace zwl
