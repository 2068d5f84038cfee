#include "zwl/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "zwl/arith.hpp"
#include "zwl/error.hpp"
#include "zwl/parallel.hpp"
#include "zwl/quadrature.hpp"

namespace zwl {

std::string_view to_string(Group g) {
  switch (g) {
    case Group::U: return "U";
    case Group::USp: return "USp";
    case Group::SO: return "SO";
    case Group::SOeven: return "SOeven";
    case Group::SOodd: return "SOodd";
  }
  return "?";
}

Group group_from_string(std::string_view name) {
  for (Group g : {Group::U, Group::USp, Group::SO, Group::SOeven, Group::SOodd})
    if (to_string(g) == name) return g;
  fail(ErrorCode::InvalidArgument, "unknown symmetry group '" + std::string(name) + "'");
}

std::string_view to_string(Normalization n) {
  return n == Normalization::Local ? "local" : "global";
}

Normalization normalization_from_string(std::string_view name) {
  if (name == "local") return Normalization::Local;
  if (name == "global") return Normalization::Global;
  fail(ErrorCode::InvalidArgument, "normalization must be local or global, got '" + std::string(name) + "'");
}

KernelSpec kernel_hat(Group group, int forced_rank) {
  if (forced_rank < 0) fail(ErrorCode::InvalidArgument, "forced rank must be >= 0");
  if (forced_rank > 0 && (group == Group::U || group == Group::USp))
    fail(ErrorCode::InvalidArgument, "forced rank is only defined for the orthogonal groups");
  KernelSpec k;
  k.group = group;
  k.forced_rank = forced_rank;
  const double r = forced_rank;
  switch (group) {
    case Group::SOeven: k.constant_part = r; k.indicator_part = 0.5; break;
    case Group::SO: k.constant_part = 0.5 + r; break;
    case Group::SOodd: k.constant_part = 1.0 + r; k.indicator_part = -0.5; break;
    case Group::USp: k.indicator_part = -0.5; break;
    case Group::U: break;
  }
  return k;
}

double predicted_density(const EvenTestFunction& fn, const KernelSpec& kernel) {
  auto integrand = [&](double y) { return fn.phihat(y) * kernel.bounded_part(y); };
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  double half = integrate(integrand, 0.0, std::min(1.0, fn.sigma), opts).value;
  if (fn.sigma > 1.0) half += integrate(integrand, 1.0, fn.sigma, opts).value;
  return kernel.delta_coefficient * fn.phihat(0.0) + 2.0 * half;
}

namespace {

// Adds one prime's contribution; returns false once the prime is past both cutoffs.
struct PrimeAccumulator {
  const EvenTestFunction& fn;
  double log_n;
  double first = 0.0;
  double second = 0.0;

  bool add(double p, double log_p, int a_p) {
    const double x = log_p / log_n;
    if (x >= fn.sigma) return false;
    const double a = a_p;
    first += a * log_p / (p * log_n) * fn.phihat(x);
    if (2.0 * x < fn.sigma) second += a * a * log_p / (p * p * log_n) * fn.phihat(2.0 * x);
    return true;
  }
};

std::int64_t prime_cutoff(double sigma, double log_n) {
  return std::max<std::int64_t>(5, static_cast<std::int64_t>(std::floor(std::exp(sigma * log_n))) + 1);
}

}  // namespace

DensityTerms curve_ef_terms(std::span<const TraceRecord> traces, const EvenTestFunction& fn, double log_n) {
  if (!(log_n > 0.0)) fail(ErrorCode::InvalidArgument, "log N must be positive");
  std::map<std::int64_t, int> by_prime;
  for (const auto& t : traces) by_prime[t.p] = t.a_p;
  DensityTerms terms;
  terms.phihat0 = fn.phihat(0.0);
  terms.phi0 = fn.phi(0.0);
  PrimeAccumulator acc{fn, log_n};
  for (std::int64_t p : primes_up_to(prime_cutoff(fn.sigma, log_n)).primes) {
    if (p <= 3) continue;
    const double log_p = std::log(static_cast<double>(p));
    if (log_p / log_n >= fn.sigma) break;
    auto it = by_prime.find(p);
    if (it == by_prime.end())
      fail(ErrorCode::InvalidArgument, "trace list is missing a_p for required prime p = " + std::to_string(p));
    acc.add(static_cast<double>(p), log_p, it->second);
  }
  terms.first_sum = acc.first;
  terms.second_sum = acc.second;
  return terms;
}

double curve_ef_sum(std::span<const TraceRecord> traces, const EvenTestFunction& fn, double log_n) {
  return curve_ef_terms(traces, fn, log_n).value();
}

DensityTerms average_terms(const TraceTable& table, std::span<const double> log_conductors,
                           const EvenTestFunction& fn, int workers) {
  const std::size_t M = table.members.size();
  if (M == 0) fail(ErrorCode::EmptyFamily, "family has no members");
  if (log_conductors.size() != M) fail(ErrorCode::InvalidArgument, "one log conductor per member required");
  std::vector<double> log_p(table.primes.size());
  for (std::size_t i = 0; i < log_p.size(); ++i) log_p[i] = std::log(static_cast<double>(table.primes[i]));

  std::vector<double> first(M), second(M);
  parallel_for(M, workers, [&](std::size_t m) {
    const double log_n = log_conductors[m];
    if (!(log_n > 0.0)) fail(ErrorCode::Computation, "non-positive log conductor at t = " + std::to_string(table.members[m]));
    PrimeAccumulator acc{fn, log_n};
    const std::int16_t* row = table.row(m);
    std::size_t i = 0;
    for (; i < table.primes.size(); ++i)
      if (!acc.add(static_cast<double>(table.primes[i]), log_p[i], row[i])) break;
    if (i == table.primes.size()) {
      const std::int64_t last = table.primes.empty() ? 3 : table.primes.back();
      for (std::int64_t q = last + 1; std::log(static_cast<double>(q)) / log_n < fn.sigma; ++q)
        if (is_prime(BigInt(q)))
          fail(ErrorCode::InvalidArgument, "trace table is missing a_p for required prime p = " + std::to_string(q));
    }
    first[m] = acc.first;
    second[m] = acc.second;
  });
  DensityTerms terms;
  terms.phihat0 = fn.phihat(0.0);
  terms.phi0 = fn.phi(0.0);
  terms.first_sum = pairwise_sum(first) / static_cast<double>(M);
  terms.second_sum = pairwise_sum(second) / static_cast<double>(M);
  return terms;
}

double support_limit(int conductor_degree) {
  if (conductor_degree <= 0) return 0.5;
  return std::min(0.5, 2.0 / (3.0 * conductor_degree));
}

DensityReport one_level_density(const Family& family, std::int64_t R, const EvenTestFunction& fn,
                                Normalization normalization, const DensityOptions& options,
                                DensityDiagnostics* diagnostics) {
  if (R < 1) fail(ErrorCode::InvalidArgument, "R must be >= 1");
  if (!(fn.sigma > 0.0)) fail(ErrorCode::InvalidArgument, "support sigma must be positive");
  if (fn.sigma >= 1.0) fail(ErrorCode::InvalidArgument, "support sigma must be < 1");
  DensityDiagnostics diag;
  const double limit = support_limit(family.conductor_degree());
  if (fn.sigma >= limit)
    diag.warnings.push_back("sigma = " + std::to_string(fn.sigma) + " is outside the proven range sigma < " +
                            std::to_string(limit) + " for deg D = " + std::to_string(family.conductor_degree()));

  std::vector<std::int64_t> members;
  if (normalization == Normalization::Local) {
    SievedFamily sieved = sieve_family(family, R, options.workers);
    members = std::move(sieved.members);
    diag.singular_skipped = sieved.singular_skipped;
  } else {
    members = nonsingular_range(family, R, &diag.singular_skipped);
  }
  if (members.empty()) fail(ErrorCode::EmptyFamily, "family is empty for R = " + std::to_string(R));

  std::vector<double> log_n(members.size());
  parallel_for(members.size(), options.workers,
               [&](std::size_t i) { log_n[i] = log_conductor(family, members[i]); });
  const double mean_log_n = pairwise_sum(log_n) / static_cast<double>(log_n.size());
  if (normalization == Normalization::Global) std::fill(log_n.begin(), log_n.end(), mean_log_n);
  const double max_log_n = *std::max_element(log_n.begin(), log_n.end());
  const std::int64_t needed = prime_cutoff(fn.sigma, max_log_n);

  TraceTable built;
  const TraceTable* table = nullptr;
  if (options.cache) {
    const TraceCache& cache = *options.cache;
    const CacheScope scope = normalization == Normalization::Local ? CacheScope::Sieved : CacheScope::AllNonsingular;
    if (cache.family_fingerprint != family.fingerprint())
      fail(ErrorCode::CacheMismatch, "trace cache belongs to a different family");
    if (cache.R != R || cache.scope != scope || cache.table.members != members)
      fail(ErrorCode::CacheMismatch, "trace cache was built for a different R or member set");
    if (cache.prime_limit < needed - 1)
      fail(ErrorCode::InvalidArgument, "trace cache covers p <= " + std::to_string(cache.prime_limit) +
                                           " but the support needs p < " + std::to_string(needed));
    table = &cache.table;
    diag.used_cache = true;
  } else {
    built = build_trace_table(family, members, needed, options.workers);
    table = &built;
  }

  DensityReport report;
  report.normalization = normalization;
  report.R = R;
  report.sigma = fn.sigma;
  report.terms = average_terms(*table, log_n, fn, options.workers);
  const double r3 = std::max<double>(3.0, static_cast<double>(R));
  report.terms.error_budget = options.kappa * std::log(std::log(r3)) / std::log(r3);
  report.value = report.terms.value();
  report.model_a = options.model_a.value_or(family.spec().rank + 0.5);
  report.model_b = options.model_b.value_or(1.0);
  report.prediction = report.model_a * report.terms.phi0 + report.model_b * report.terms.phihat0;

  diag.family_size = members.size();
  diag.mean_log_conductor = mean_log_n;
  diag.prime_limit = options.cache ? options.cache->prime_limit : needed;
  if (diagnostics) *diagnostics = std::move(diag);
  return report;
}

std::vector<std::int64_t> dyadic_ladder(std::int64_t r_max) {
  if (r_max < 1) fail(ErrorCode::InvalidArgument, "R must be >= 1");
  std::vector<std::int64_t> out;
  for (std::int64_t R = r_max; R >= 32 && out.size() < 8; R /= 2) out.push_back(R);
  if (out.empty()) out.push_back(r_max);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<ConvergenceRow> convergence_rows(const Family& family, std::span<const std::int64_t> ladder,
                                             const EvenTestFunction& fn, Normalization normalization,
                                             const DensityOptions& options) {
  DensityOptions opts = options;
  opts.cache = nullptr;
  std::vector<ConvergenceRow> rows;
  for (std::int64_t R : ladder) {
    const TraceCache* cache = options.cache && options.cache->R == R ? options.cache : nullptr;
    opts.cache = cache;
    DensityReport rep = one_level_density(family, R, fn, normalization, opts);
    rows.push_back({R, rep.value, rep.prediction, std::abs(rep.value - rep.prediction)});
  }
  return rows;
}

std::int64_t first_moment(const Family& family, std::int64_t p) {
  if (p <= 3 || !is_prime(BigInt(p))) fail(ErrorCode::InvalidArgument, "first moment needs a prime p > 3");
  const CharacterTable chi(p);
  std::int64_t total = 0;
  for (std::int64_t t = 0; t < p; ++t)
    total += chi.trace(mod_small(family.A_at(t), p), mod_small(family.B_at(t), p));
  return total;
}

std::string to_json(const DensityReport& report) {
  nlohmann::json j;
  j["normalization"] = to_string(report.normalization);
  j["R"] = report.R;
  j["sigma"] = report.sigma;
  j["value"] = report.value;
  j["terms"] = {{"phihat0", report.terms.phihat0},
                {"phi0", report.terms.phi0},
                {"first_sum", report.terms.first_sum},
                {"second_sum", report.terms.second_sum},
                {"error_budget", report.terms.error_budget}};
  j["prediction"] = report.prediction;
  j["model_a"] = report.model_a;
  j["model_b"] = report.model_b;
  return j.dump();
}

std::string to_json(const DensityDiagnostics& d) {
  nlohmann::json j;
  j["family_size"] = d.family_size;
  j["singular_skipped"] = d.singular_skipped;
  j["mean_log_conductor"] = d.mean_log_conductor;
  j["prime_limit"] = d.prime_limit;
  j["used_cache"] = d.used_cache;
  j["warnings"] = d.warnings;
  return j.dump();
}

}  // namespace zwl
