#include "zwl/family.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "zwl/error.hpp"
#include "zwl/parallel.hpp"

namespace zwl {

namespace {

using QPoly = std::vector<boost::multiprecision::cpp_rational>;
using Rat = boost::multiprecision::cpp_rational;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void trim(std::vector<BigInt>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly derivative(const QPoly& p) {
  QPoly out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * static_cast<int>(i));
  trim(out);
  return out;
}

// Long division over Q; returns quotient, leaves remainder in `num`.
QPoly divide(QPoly& num, const QPoly& den) {
  QPoly quot;
  if (num.size() < den.size()) return quot;
  quot.assign(num.size() - den.size() + 1, Rat(0));
  while (!num.empty() && num.size() >= den.size()) {
    std::size_t shift = num.size() - den.size();
    Rat factor = num.back() / den.back();
    quot[shift] = factor;
    for (std::size_t i = 0; i < den.size(); ++i) num[i + shift] -= factor * den[i];
    num.pop_back();
    trim(num);
  }
  trim(quot);
  return quot;
}

QPoly gcd(QPoly a, QPoly b) {
  while (!b.empty()) {
    QPoly r = a;
    divide(r, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Rat lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

std::vector<BigInt> poly_mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<BigInt> out(a.size() + b.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  trim(out);
  return out;
}

std::vector<BigInt> poly_add(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  std::vector<BigInt> out(std::max(a.size(), b.size()), BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  trim(out);
  return out;
}

std::vector<BigInt> poly_scale(const std::vector<BigInt>& a, const BigInt& k) {
  std::vector<BigInt> out = a;
  for (auto& c : out) c *= k;
  trim(out);
  return out;
}

std::int64_t poly_mod_eval(const std::vector<std::int64_t>& coeffs_mod, std::int64_t x, std::int64_t p) {
  std::int64_t acc = 0;
  for (auto it = coeffs_mod.rbegin(); it != coeffs_mod.rend(); ++it) acc = (acc * x + *it) % p;
  return acc;
}

std::vector<std::int64_t> reduce_coeffs(const std::vector<BigInt>& coeffs, std::int64_t p) {
  std::vector<std::int64_t> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) out.push_back(mod_small(c, p));
  return out;
}

BigInt parse_integer(const nlohmann::json& v, const std::string& field) {
  if (v.is_number_integer()) return BigInt(v.get<long long>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start || !std::all_of(s.begin() + static_cast<long>(start), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      fail(ErrorCode::InvalidArgument, "family spec: field '" + field + "' holds non-integer '" + s + "'");
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  }
  fail(ErrorCode::InvalidArgument, "family spec: field '" + field + "' must be an integer or integer string");
}

std::int64_t parse_small(const nlohmann::json& v, const std::string& field) {
  BigInt b = parse_integer(v, field);
  if (boost::multiprecision::abs(b) > BigInt(std::numeric_limits<std::int64_t>::max() / 4))
    fail(ErrorCode::InvalidArgument, "family spec: field '" + field + "' out of range");
  return static_cast<std::int64_t>(b);
}

double log_big(const BigInt& n) {
  // log via the top 64 bits for values beyond double range.
  unsigned bits = boost::multiprecision::msb(n) + 1;
  if (bits < 1000) return std::log(static_cast<double>(n));
  unsigned shift = bits - 64;
  return std::log(static_cast<double>(BigInt(n >> shift))) + shift * std::log(2.0);
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t& pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + static_cast<std::size_t>(i)]) << (8 * i);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

Fingerprint sha256(const std::uint8_t* data, std::size_t size) {
  Fingerprint out{};
  unsigned int len = 0;
  if (EVP_Digest(data, size, out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
    fail(ErrorCode::Computation, "SHA-256 digest failed");
  return out;
}

constexpr char kMagic[4] = {'Z', 'W', 'L', '1'};
constexpr std::int64_t kMaxPrimeLimit = 100'000'000;

}  // namespace

// ------------------------------------------------------------------ FamilySpec

std::string canonical_json(const FamilySpec& spec) {
  nlohmann::json j;
  auto strings = [](const std::vector<BigInt>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : v) arr.push_back(c.str());
    return arr;
  };
  j["A"] = strings(spec.A);
  j["B"] = strings(spec.B);
  j["r"] = spec.rank;
  j["c"] = spec.sieve_c;
  j["t0"] = spec.sieve_t0;
  j["B_square"] = spec.fixed_square.str();
  j["small_prime_policy"] =
      spec.small_prime_policy == SmallPrimePolicy::IncludeOnce ? "include-once" : "exclude";
  return j.dump();
}

FamilySpec family_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("family spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "family spec must be a JSON object");
  static const std::set<std::string> known = {"A", "B", "r", "c", "t0", "B_square", "small_prime_policy"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) fail(ErrorCode::InvalidArgument, "family spec: unknown field '" + key + "'");
  FamilySpec spec;
  for (const char* name : {"A", "B"}) {
    if (!j.contains(name) || !j[name].is_array())
      fail(ErrorCode::InvalidArgument, std::string("family spec: '") + name + "' must be an array");
    auto& target = std::string(name) == "A" ? spec.A : spec.B;
    for (const auto& c : j[name]) target.push_back(parse_integer(c, name));
    trim(target);
  }
  if (j.contains("r")) spec.rank = static_cast<int>(parse_small(j["r"], "r"));
  if (j.contains("c")) spec.sieve_c = parse_small(j["c"], "c");
  if (j.contains("t0")) spec.sieve_t0 = parse_small(j["t0"], "t0");
  if (j.contains("B_square")) spec.fixed_square = parse_integer(j["B_square"], "B_square");
  if (j.contains("small_prime_policy")) {
    std::string p = j["small_prime_policy"].get<std::string>();
    if (p == "include-once") spec.small_prime_policy = SmallPrimePolicy::IncludeOnce;
    else if (p == "exclude") spec.small_prime_policy = SmallPrimePolicy::Exclude;
    else fail(ErrorCode::InvalidArgument, "family spec: unknown small_prime_policy '" + p + "'");
  }
  return spec;
}

Fingerprint fingerprint(const FamilySpec& spec) {
  const std::string text = canonical_json(spec);
  return sha256(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

std::string to_hex(const Fingerprint& fp) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : fp) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

// ---------------------------------------------------------------------- Family

std::vector<BigInt> squarefree_part(const std::vector<BigInt>& poly) {
  std::vector<BigInt> p = poly;
  trim(p);
  if (p.empty()) fail(ErrorCode::InvalidArgument, "square-free part of the zero polynomial");
  if (p.size() == 1) return {BigInt(1)};
  QPoly q(p.begin(), p.end());
  QPoly g = gcd(q, derivative(q));
  QPoly num = q;
  QPoly sq = divide(num, g);
  // Clear denominators, then remove the content.
  BigInt lcm = 1;
  for (const auto& c : sq) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(c));
  std::vector<BigInt> out;
  BigInt content = 0;
  for (const auto& c : sq) {
    BigInt v = boost::multiprecision::numerator(c) * (lcm / boost::multiprecision::denominator(c));
    out.push_back(v);
    content = boost::multiprecision::gcd(content, v);
  }
  if (out.back() < 0) content = -content;
  for (auto& c : out) c /= content;
  return out;
}

Family::Family(FamilySpec spec) : spec_(std::move(spec)) {
  trim(spec_.A);
  trim(spec_.B);
  if (spec_.rank < 0) fail(ErrorCode::InvalidArgument, "family rank r must be >= 0");
  if (spec_.sieve_c < 1) fail(ErrorCode::InvalidArgument, "sieve parameter c must be >= 1");
  if (spec_.fixed_square < 1) fail(ErrorCode::InvalidArgument, "B_square must be a positive integer");
  auto a3 = poly_mul(poly_mul(spec_.A, spec_.A), spec_.A);
  auto b2 = poly_mul(spec_.B, spec_.B);
  disc_poly_ = poly_scale(poly_add(poly_scale(a3, 4), poly_scale(b2, 27)), -16);
  if (disc_poly_.empty())
    fail(ErrorCode::InvalidArgument, "discriminant polynomial is identically zero");
  squarefree_poly_ = squarefree_part(disc_poly_);
  fingerprint_ = zwl::fingerprint(spec_);
}

void Family::set_conductor_overrides(std::map<std::int64_t, BigInt> overrides) {
  for (const auto& [t, n] : overrides)
    if (n < 1) fail(ErrorCode::InvalidArgument, "conductor override for t = " + std::to_string(t) + " is not positive");
  overrides_ = std::move(overrides);
}

BigInt Family::A_at(std::int64_t t) const { return poly_eval(spec_.A, BigInt(t)); }
BigInt Family::B_at(std::int64_t t) const { return poly_eval(spec_.B, BigInt(t)); }
BigInt Family::D_at(std::int64_t t) const { return poly_eval(squarefree_poly_, BigInt(t)); }

MinimalModel specialize_minimal(const Family& family, std::int64_t t) {
  BigInt a = family.A_at(t);
  BigInt b = family.B_at(t);
  if (discriminant(a, b) == 0)
    fail(ErrorCode::Singular, "singular specialization at t = " + std::to_string(t));
  return minimalize(EllipticCurve(a, b));
}

EllipticCurve specialize(const Family& family, std::int64_t t) {
  return specialize_minimal(family, t).curve;
}

// ----------------------------------------------------------------------- sieve

bool sieve_admits(const Factorization& d_value, const BigInt& fixed_square,
                  const std::map<BigInt, int>& exponents) {
  for (const auto& pp : d_value.factors)
    if (pp.exponent >= 2 && fixed_square % pp.prime != 0) return false;
  for (const auto& [q, e] : exponents)
    if (d_value.ord(q) != e) return false;
  return true;
}

std::map<BigInt, int> calibrate_exponents(const Family& family) {
  const auto& spec = family.spec();
  std::map<BigInt, int> exponents;
  if (spec.fixed_square == 1) return exponents;
  const auto square_primes = factorize(spec.fixed_square).factors;
  std::int64_t t = ((spec.sieve_t0 % spec.sieve_c) + spec.sieve_c) % spec.sieve_c;
  if (t < 1) t += spec.sieve_c;
  std::map<BigInt, std::set<int>> seen;
  int found = 0;
  for (int scanned = 0; found < 32 && scanned < 100000; ++scanned, t += spec.sieve_c) {
    BigInt d = family.D_at(t);
    if (d == 0) continue;
    Factorization f = factorize(d);
    bool admissible = true;
    for (const auto& pp : f.factors)
      if (pp.exponent >= 2 && spec.fixed_square % pp.prime != 0) admissible = false;
    if (!admissible) continue;
    ++found;
    for (const auto& q : square_primes) seen[q.prime].insert(f.ord(q.prime));
  }
  if (found < 32)
    fail(ErrorCode::SieveConfig, "sieve calibration found fewer than 32 admissible t");
  for (const auto& [q, values] : seen) {
    if (values.size() != 1) {
      std::ostringstream msg;
      msg << "sieve configuration invalid: the power of " << q
          << " dividing D(t) is not independent of t (observed";
      for (int v : values) msg << ' ' << v;
      msg << "); choose c and t0 so that it is fixed";
      fail(ErrorCode::SieveConfig, msg.str());
    }
    exponents[q] = *values.begin();
  }
  return exponents;
}

SievedFamily sieve_family(const Family& family, std::int64_t R, int workers) {
  if (R < 1) fail(ErrorCode::InvalidArgument, "sieve_family requires R >= 1");
  const auto& spec = family.spec();
  SievedFamily out;
  out.R = R;
  out.exponents = calibrate_exponents(family);
  std::vector<std::int64_t> candidates;
  for (std::int64_t t = R; t <= 2 * R; ++t)
    if (((t - spec.sieve_t0) % spec.sieve_c + spec.sieve_c) % spec.sieve_c == 0) candidates.push_back(t);
  // 0 reject, 1 admit, 2 singular
  std::vector<std::uint8_t> verdict(candidates.size(), 0);
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    BigInt d = family.D_at(candidates[i]);
    if (d == 0) {
      verdict[i] = 2;
      return;
    }
    verdict[i] = sieve_admits(factorize(d), spec.fixed_square, out.exponents) ? 1 : 0;
  });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (verdict[i] == 1) out.members.push_back(candidates[i]);
    if (verdict[i] == 2) ++out.singular_skipped;
  }
  return out;
}

std::vector<std::int64_t> nonsingular_range(const Family& family, std::int64_t R,
                                            std::int64_t* singular_skipped) {
  if (R < 1) fail(ErrorCode::InvalidArgument, "R must be >= 1");
  std::vector<std::int64_t> out;
  std::int64_t skipped = 0;
  for (std::int64_t t = R; t <= 2 * R; ++t) {
    if (poly_eval(family.disc_poly(), BigInt(t)) == 0) {
      ++skipped;
      continue;
    }
    out.push_back(t);
  }
  if (singular_skipped) *singular_skipped = skipped;
  return out;
}

// ------------------------------------------------------------------- conductor

double log_conductor(const Family& family, std::int64_t t) {
  if (auto it = family.conductor_overrides().find(t); it != family.conductor_overrides().end())
    return log_big(it->second);
  const MinimalModel model = specialize_minimal(family, t);
  const Factorization f = factorize(model.curve.disc());
  double sum = 0.0;
  for (const auto& pp : f.factors) {
    if (pp.prime > 3) {
      sum += log_big(pp.prime);
    } else if (family.spec().small_prime_policy == SmallPrimePolicy::IncludeOnce) {
      sum += std::log(static_cast<double>(pp.prime));
    }
  }
  if (!(sum > 0.0))
    fail(ErrorCode::Computation, "conductor proxy is 1 at t = " + std::to_string(t) +
                                     "; use the include-once small-prime policy or an override");
  return sum;
}

double avg_log_conductor(const Family& family, std::int64_t R, int workers) {
  std::vector<std::int64_t> ts = nonsingular_range(family, R);
  if (ts.empty()) fail(ErrorCode::EmptyFamily, "no nonsingular t in [R, 2R]");
  std::vector<double> logs(ts.size());
  parallel_for(ts.size(), workers, [&](std::size_t i) { logs[i] = log_conductor(family, ts[i]); });
  return pairwise_sum(logs) / static_cast<double>(logs.size());
}

std::map<std::int64_t, BigInt> load_conductor_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open conductor file " + path);
  std::string line;
  std::map<std::int64_t, BigInt> out;
  if (!std::getline(in, line)) fail(ErrorCode::InvalidArgument, "conductor file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,conductor") fail(ErrorCode::InvalidArgument, "conductor file must start with header 't,conductor'");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::InvalidArgument, "conductor file line " + std::to_string(lineno) + ": expected t,conductor");
    try {
      nlohmann::json t = line.substr(0, comma);
      nlohmann::json n = line.substr(comma + 1);
      out[parse_small(t, "t")] = parse_integer(n, "conductor");
    } catch (const Error& e) {
      fail(ErrorCode::InvalidArgument, "conductor file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------- traces

TraceTable build_trace_table(const Family& family, std::vector<std::int64_t> members,
                             std::int64_t prime_limit, int workers) {
  if (prime_limit > kMaxPrimeLimit)
    fail(ErrorCode::InvalidArgument, "prime limit exceeds " + std::to_string(kMaxPrimeLimit));
  TraceTable table;
  table.members = std::move(members);
  for (std::int64_t p : primes_up_to(prime_limit).primes)
    if (p > 3) table.primes.push_back(p);
  const std::size_t M = table.members.size();
  const std::size_t P = table.primes.size();
  table.traces.assign(M * P, 0);

  // Members whose model was rescaled keep their minimal coefficients; at
  // primes not dividing the scale the trace is unchanged by the twist.
  std::vector<std::pair<std::size_t, MinimalModel>> rescaled;
  for (std::size_t m = 0; m < M; ++m) {
    MinimalModel model = specialize_minimal(family, table.members[m]);
    if (model.scale != 1) rescaled.emplace_back(m, std::move(model));
  }

  parallel_for(P, workers, [&](std::size_t pi) {
    const std::int64_t p = table.primes[pi];
    const CharacterTable chi(p);
    const auto a_mod = reduce_coeffs(family.spec().A, p);
    const auto b_mod = reduce_coeffs(family.spec().B, p);
    auto trace_at_residue = [&](std::int64_t s) {
      return chi.trace(poly_mod_eval(a_mod, s, p), poly_mod_eval(b_mod, s, p));
    };
    if (static_cast<std::size_t>(p) <= M) {
      std::vector<int> by_residue(static_cast<std::size_t>(p));
      for (std::int64_t s = 0; s < p; ++s) by_residue[static_cast<std::size_t>(s)] = trace_at_residue(s);
      for (std::size_t m = 0; m < M; ++m) {
        std::int64_t s = ((table.members[m] % p) + p) % p;
        table.traces[m * P + pi] = static_cast<std::int16_t>(by_residue[static_cast<std::size_t>(s)]);
      }
    } else {
      for (std::size_t m = 0; m < M; ++m) {
        std::int64_t s = ((table.members[m] % p) + p) % p;
        table.traces[m * P + pi] = static_cast<std::int16_t>(trace_at_residue(s));
      }
    }
    for (const auto& [m, model] : rescaled) {
      if (model.scale % p != 0) continue;
      table.traces[m * P + pi] = static_cast<std::int16_t>(
          chi.trace(mod_small(model.curve.a(), p), mod_small(model.curve.b(), p)));
    }
  });
  return table;
}

TraceCache build_trace_cache(const Family& family, std::int64_t R, std::int64_t prime_limit,
                             CacheScope scope, int workers) {
  if (prime_limit < 5) fail(ErrorCode::InvalidArgument, "trace cache requires prime_limit >= 5");
  std::vector<std::int64_t> members = scope == CacheScope::Sieved
                                          ? sieve_family(family, R, workers).members
                                          : nonsingular_range(family, R);
  TraceCache cache;
  cache.family_fingerprint = family.fingerprint();
  cache.R = R;
  cache.prime_limit = prime_limit;
  cache.scope = scope;
  cache.build_time = static_cast<std::int64_t>(std::time(nullptr));
  cache.table = build_trace_table(family, std::move(members), prime_limit, workers);
  return cache;
}

// Layout (little endian):
//   "ZWL1" | fingerprint[32] | R:i64 | prime_limit:i64
//   | scope:u8 | build_time:i64 | member_count:u32 | prime_count:u32
//   | members:i64[member_count] | traces:i16[member_count * prime_count]
//   | sha256 of all preceding bytes [32]
void save_trace_cache(const TraceCache& cache, const std::string& path) {
  std::vector<std::uint8_t> bytes(std::begin(kMagic), std::end(kMagic));
  bytes.insert(bytes.end(), cache.family_fingerprint.begin(), cache.family_fingerprint.end());
  put_u64(bytes, static_cast<std::uint64_t>(cache.R), 8);
  put_u64(bytes, static_cast<std::uint64_t>(cache.prime_limit), 8);
  put_u64(bytes, static_cast<std::uint64_t>(cache.scope), 1);
  put_u64(bytes, static_cast<std::uint64_t>(cache.build_time), 8);
  put_u64(bytes, cache.table.members.size(), 4);
  put_u64(bytes, cache.table.primes.size(), 4);
  for (auto t : cache.table.members) put_u64(bytes, static_cast<std::uint64_t>(t), 8);
  for (auto a : cache.table.traces) put_u64(bytes, static_cast<std::uint16_t>(a), 2);
  Fingerprint sum = sha256(bytes.data(), bytes.size());
  bytes.insert(bytes.end(), sum.begin(), sum.end());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write trace cache " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to trace cache " + path);
}

TraceCache load_trace_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open trace cache " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 32 + 8 + 8 + 1 + 8 + 4 + 4;
  auto corrupt = [&](const std::string& why) { fail(ErrorCode::CacheCorrupt, "trace cache " + path + ": " + why); };
  if (bytes.size() < kHeader + 32) corrupt("truncated");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) corrupt("bad magic");
  const std::size_t body = bytes.size() - 32;
  Fingerprint expected = sha256(bytes.data(), body);
  if (!std::equal(expected.begin(), expected.end(), bytes.begin() + static_cast<long>(body)))
    corrupt("checksum mismatch");

  TraceCache cache;
  std::size_t pos = 4;
  std::copy_n(bytes.begin() + 4, 32, cache.family_fingerprint.begin());
  pos += 32;
  cache.R = static_cast<std::int64_t>(get_u64(bytes, pos, 8));
  cache.prime_limit = static_cast<std::int64_t>(get_u64(bytes, pos, 8));
  auto scope = get_u64(bytes, pos, 1);
  if (scope > 1) corrupt("unknown scope");
  cache.scope = static_cast<CacheScope>(scope);
  cache.build_time = static_cast<std::int64_t>(get_u64(bytes, pos, 8));
  const std::size_t M = get_u64(bytes, pos, 4);
  const std::size_t P = get_u64(bytes, pos, 4);
  if (pos + M * 8 + M * P * 2 != body) corrupt("size does not match header counts");
  if (cache.prime_limit < 5 || cache.prime_limit > kMaxPrimeLimit) corrupt("prime limit out of range");
  for (std::size_t i = 0; i < M; ++i) cache.table.members.push_back(static_cast<std::int64_t>(get_u64(bytes, pos, 8)));
  cache.table.traces.resize(M * P);
  for (std::size_t i = 0; i < M * P; ++i) cache.table.traces[i] = static_cast<std::int16_t>(get_u64(bytes, pos, 2));
  for (std::int64_t p : primes_up_to(cache.prime_limit).primes)
    if (p > 3) cache.table.primes.push_back(p);
  if (cache.table.primes.size() != P) corrupt("prime count does not match prime limit");
  return cache;
}

TraceCache load_trace_cache(const std::string& path, const Family& family) {
  TraceCache cache = load_trace_cache(path);
  if (cache.family_fingerprint != family.fingerprint())
    fail(ErrorCode::CacheMismatch, "trace cache " + path + " was built for a different family (fingerprint " +
                                       to_hex(cache.family_fingerprint) + ")");
  return cache;
}

}  // namespace zwl
