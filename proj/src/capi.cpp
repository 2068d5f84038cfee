#include "zwl/zwl.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zwl/bounds.hpp"
#include "zwl/density.hpp"
#include "zwl/error.hpp"
#include "zwl/family.hpp"
#include "zwl/optimize.hpp"
#include "zwl/rmtsim.hpp"
#include "zwl/testfunc.hpp"

using nlohmann::json;

struct zwl_family {
  zwl::Family family;
};

struct zwl_test_function {
  zwl::EvenTestFunction fn;
  json descriptor;
};

struct zwl_trace_cache {
  zwl::TraceCache cache;
};

namespace {

thread_local std::string last_error;

template <typename F>
zwl_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ZWL_OK;
  } catch (const zwl::Error& e) {
    last_error = e.what();
    return static_cast<zwl_status>(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("malformed JSON input: ") + e.what();
    return ZWL_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ZWL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ZWL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) zwl::fail(zwl::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_json(const char* text) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    zwl::fail(zwl::ErrorCode::InvalidArgument, std::string("invalid JSON: ") + e.what());
  }
}

zwl::Rational rational_field(const json& v) {
  if (v.is_string()) return zwl::parse_rational(v.get<std::string>());
  if (v.is_number()) return zwl::parse_rational(v.dump());
  zwl::fail(zwl::ErrorCode::InvalidArgument, "expected a number or numeric string");
}

zwl::TestFunctionH h_from_json(const json& j) {
  const std::string kind = j.value("kind", "even_polynomial");
  if (kind == "even_polynomial") {
    std::vector<zwl::Rational> q;
    if (!j.contains("q") || !j["q"].is_array())
      zwl::fail(zwl::ErrorCode::InvalidArgument, "even_polynomial needs an array 'q'");
    for (const auto& c : j["q"]) q.push_back(rational_field(c));
    return zwl::TestFunctionH::even_polynomial(std::move(q));
  }
  if (kind == "bump") {
    if (!j.contains("a")) zwl::fail(zwl::ErrorCode::InvalidArgument, "bump needs a parameter 'a'");
    return zwl::TestFunctionH::bump(rational_field(j["a"]));
  }
  zwl::fail(zwl::ErrorCode::InvalidArgument, "unknown test function kind '" + kind + "'");
}

json optimum_json(const zwl::OptimumReport& r) {
  return {{"n", r.n},
          {"coefficients", r.coefficients},
          {"C", r.c_value},
          {"objective", r.objective_value},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"monotone", r.monotone}};
}

json bounds_json(const zwl::BoundsReport& b) {
  return {{"r", b.r},           {"sigma", b.sigma},     {"tau", b.tau},         {"tau_lower", b.tau_lower},
          {"model_a", b.model_a}, {"model_b", b.model_b}, {"lower", b.lower},     {"rmt", b.rmt},
          {"upper", b.upper},   {"tau_bsd", b.tau_bsd}, {"C_h", b.c_h},         {"sandwich_ok", b.sandwich_ok}};
}

zwl::CacheScope scope_from(const char* scope) {
  const std::string s = scope ? scope : "sieved";
  if (s == "sieved") return zwl::CacheScope::Sieved;
  if (s == "all") return zwl::CacheScope::AllNonsingular;
  zwl::fail(zwl::ErrorCode::InvalidArgument, "cache scope must be sieved or all");
}

}  // namespace

extern "C" {

const char* zwl_version(void) { return "zwl " ZWL_VERSION; }

const char* zwl_last_error(void) { return last_error.c_str(); }

void zwl_string_free(char* s) { std::free(s); }

zwl_status zwl_family_from_json(const char* text, zwl_family** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = nullptr;
    *out = new zwl_family{zwl::Family(zwl::family_spec_from_json(text))};
  });
}

void zwl_family_free(zwl_family* family) { delete family; }

zwl_status zwl_family_load_conductors(zwl_family* family, const char* csv_path) {
  return guarded([&] {
    require(family, "family");
    require(csv_path, "csv_path");
    family->family.set_conductor_overrides(zwl::load_conductor_overrides(csv_path));
  });
}

zwl_status zwl_family_describe(const zwl_family* family, char** json_out) {
  return guarded([&] {
    require(family, "family");
    require(json_out, "json_out");
    *json_out = nullptr;
    const auto& f = family->family;
    auto strings = [](const std::vector<zwl::BigInt>& v) {
      json arr = json::array();
      for (const auto& c : v) arr.push_back(c.str());
      return arr;
    };
    json j;
    j["spec"] = json::parse(zwl::canonical_json(f.spec()));
    j["fingerprint"] = zwl::to_hex(f.fingerprint());
    j["discriminant"] = strings(f.disc_poly());
    j["D"] = strings(f.squarefree_disc_poly());
    j["deg_D"] = f.conductor_degree();
    j["support_limit"] = zwl::support_limit(f.conductor_degree());
    *json_out = dup_string(j.dump());
  });
}

zwl_status zwl_family_sieve(const zwl_family* family, int64_t R, int workers, char** json_out) {
  return guarded([&] {
    require(family, "family");
    require(json_out, "json_out");
    *json_out = nullptr;
    const zwl::SievedFamily s = zwl::sieve_family(family->family, R, workers);
    json exps = json::object();
    for (const auto& [q, e] : s.exponents) exps[q.str()] = e;
    json j = {{"R", s.R},
              {"size", s.members.size()},
              {"members", s.members},
              {"exponents", exps},
              {"singular_skipped", s.singular_skipped}};
    *json_out = dup_string(j.dump());
  });
}

zwl_status zwl_family_log_conductor(const zwl_family* family, int64_t t, double* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = zwl::log_conductor(family->family, t);
  });
}

zwl_status zwl_family_avg_log_conductor(const zwl_family* family, int64_t R, int workers, double* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = zwl::avg_log_conductor(family->family, R, workers);
  });
}

zwl_status zwl_first_moment(const zwl_family* family, int64_t p, int64_t* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = zwl::first_moment(family->family, p);
  });
}

zwl_status zwl_trace_cache_build(const zwl_family* family, int64_t R, int64_t prime_limit, const char* scope,
                                 int workers, zwl_trace_cache** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = nullptr;
    *out = new zwl_trace_cache{zwl::build_trace_cache(family->family, R, prime_limit, scope_from(scope), workers)};
  });
}

zwl_status zwl_trace_cache_save(const zwl_trace_cache* cache, const char* path) {
  return guarded([&] {
    require(cache, "cache");
    require(path, "path");
    zwl::save_trace_cache(cache->cache, path);
  });
}

zwl_status zwl_trace_cache_load(const char* path, const zwl_family* family, zwl_trace_cache** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new zwl_trace_cache{family ? zwl::load_trace_cache(path, family->family) : zwl::load_trace_cache(path)};
  });
}

zwl_status zwl_trace_cache_info(const zwl_trace_cache* cache, char** json_out) {
  return guarded([&] {
    require(cache, "cache");
    require(json_out, "json_out");
    *json_out = nullptr;
    const auto& c = cache->cache;
    json j = {{"fingerprint", zwl::to_hex(c.family_fingerprint)},
              {"R", c.R},
              {"prime_limit", c.prime_limit},
              {"scope", c.scope == zwl::CacheScope::Sieved ? "sieved" : "all"},
              {"build_time", c.build_time},
              {"members", c.table.members.size()},
              {"primes", c.table.primes.size()}};
    *json_out = dup_string(j.dump());
  });
}

void zwl_trace_cache_free(zwl_trace_cache* cache) { delete cache; }

zwl_status zwl_test_function_from_json(const char* text, zwl_test_function** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    json j = parse_json(text);
    if (!j.contains("sigma")) zwl::fail(zwl::ErrorCode::InvalidArgument, "test function needs 'sigma'");
    const double sigma = j["sigma"].get<double>();
    if (!(sigma > 0.0)) zwl::fail(zwl::ErrorCode::InvalidArgument, "sigma must be positive");
    const std::string kind = j.value("kind", "fejer");
    zwl::EvenTestFunction fn;
    if (kind == "fejer") {
      fn = zwl::fejer(sigma).as_test_function();
    } else {
      zwl::TestFunctionH h = h_from_json(j);
      const double tau = j.contains("tau") ? j["tau"].get<double>() : zwl::tau_bsd(h, sigma);
      j["tau"] = tau;
      fn = zwl::build_phi(h, sigma, tau).as_test_function();
    }
    *out = new zwl_test_function{std::move(fn), j};
  });
}

void zwl_test_function_free(zwl_test_function* fn) { delete fn; }

zwl_status zwl_test_function_eval(const zwl_test_function* fn, double x, double* out) {
  return guarded([&] {
    require(fn, "fn");
    require(out, "out");
    *out = fn->fn.phi(x);
  });
}

zwl_status zwl_test_function_eval_hat(const zwl_test_function* fn, double y, double* out) {
  return guarded([&] {
    require(fn, "fn");
    require(out, "out");
    *out = fn->fn.phihat(y);
  });
}

zwl_status zwl_test_function_sigma(const zwl_test_function* fn, double* out) {
  return guarded([&] {
    require(fn, "fn");
    require(out, "out");
    *out = fn->fn.sigma;
  });
}

zwl_status zwl_density(const zwl_family* family, const zwl_test_function* fn, const char* options_json,
                       const zwl_trace_cache* cache, char** json_out) {
  return guarded([&] {
    require(family, "family");
    require(fn, "fn");
    require(json_out, "json_out");
    *json_out = nullptr;
    const json o = parse_json(options_json);
    if (!o.contains("R")) zwl::fail(zwl::ErrorCode::InvalidArgument, "density options need 'R'");
    const std::int64_t R = o["R"].get<std::int64_t>();
    const auto normalization = zwl::normalization_from_string(o.value("normalization", "global"));
    zwl::DensityOptions opts;
    if (o.contains("a") && !o["a"].is_null()) opts.model_a = o["a"].get<double>();
    if (o.contains("b") && !o["b"].is_null()) opts.model_b = o["b"].get<double>();
    opts.kappa = o.value("kappa", 1.0);
    opts.workers = o.value("workers", 1);
    opts.cache = cache ? &cache->cache : nullptr;
    zwl::DensityDiagnostics diag;
    const zwl::DensityReport report = zwl::one_level_density(family->family, R, fn->fn, normalization, opts, &diag);
    json j;
    j["report"] = json::parse(zwl::to_json(report));
    j["diagnostics"] = json::parse(zwl::to_json(diag));
    j["test_function"] = fn->descriptor;
    if (o.value("ladder", false)) {
      const auto ladder = zwl::dyadic_ladder(R);
      json rows = json::array();
      for (const auto& row : zwl::convergence_rows(family->family, ladder, fn->fn, normalization, opts))
        rows.push_back({{"R", row.R}, {"value", row.value}, {"prediction", row.prediction},
                        {"discrepancy", row.discrepancy}});
      j["convergence"] = rows;
    }
    *json_out = dup_string(j.dump());
  });
}

zwl_status zwl_predicted_density(const zwl_test_function* fn, const char* group, int forced_rank, double* out) {
  return guarded([&] {
    require(fn, "fn");
    require(group, "group");
    require(out, "out");
    *out = zwl::predicted_density(fn->fn, zwl::kernel_hat(zwl::group_from_string(group), forced_rank));
  });
}

zwl_status zwl_c_of_h(const char* h_json, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = zwl::c_of_h(h_from_json(parse_json(h_json)));
  });
}

zwl_status zwl_optimize(int n, const char* options_json, char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    *json_out = nullptr;
    const json o = parse_json(options_json);
    zwl::OptimizeOptions opts;
    opts.starts = o.value("starts", opts.starts);
    opts.tolerance = o.value("tolerance", opts.tolerance);
    opts.max_iter = o.value("max_iter", opts.max_iter);
    opts.workers = o.value("workers", opts.workers);
    json j;
    j["optimum"] = optimum_json(zwl::maximize_c(n, opts));
    if (n == 2) {
      const auto reference = zwl::reference_optimal_h2();
      j["reference"] = {{"coefficients", {-0.233428, 0.0189588}}, {"C", zwl::c_of_h(reference)}};
    }
    *json_out = dup_string(j.dump());
  });
}

zwl_status zwl_scan_candidates(char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    *json_out = nullptr;
    json rows = json::array();
    for (const auto& row : zwl::scan_candidates())
      rows.push_back({{"name", row.name}, {"h", row.h.describe()}, {"C", row.c_value}});
    *json_out = dup_string(rows.dump());
  });
}

zwl_status zwl_bounds(int r, double sigma, const char* options_json, char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    *json_out = nullptr;
    const json o = parse_json(options_json);
    const zwl::TestFunctionH h =
        o.contains("h") ? h_from_json(o["h"]) : zwl::TestFunctionH::even_polynomial({zwl::Rational(1)});
    zwl::SandwichOptions opts;
    if (o.contains("a") && !o["a"].is_null()) opts.model_a = o["a"].get<double>();
    if (o.contains("b") && !o["b"].is_null()) opts.model_b = o["b"].get<double>();
    if (o.contains("tau") && !o["tau"].is_null()) opts.tau = o["tau"].get<double>();
    if (o.contains("tau_lower") && !o["tau_lower"].is_null()) opts.tau_lower = o["tau_lower"].get<double>();
    const zwl::BoundsReport report = zwl::sandwich(r, sigma, h, zwl::fejer(sigma), opts);
    json j = bounds_json(report);
    j["h"] = h.describe();
    j["table"] = zwl::format_bounds_table(report);
    *json_out = dup_string(j.dump());
  });
}

zwl_status zwl_simulate(const char* config_json, int workers, char** json_out, char** counts_csv) {
  return guarded([&] {
    require(json_out, "json_out");
    *json_out = nullptr;
    if (counts_csv) *counts_csv = nullptr;
    const json o = parse_json(config_json);
    zwl::EnsembleConfig config;
    config.N = o.value("N", config.N);
    config.parity = zwl::parity_from_string(o.value("parity", std::string("mixed")));
    config.forced_rank = o.value("r", config.forced_rank);
    config.samples = o.value("samples", config.samples);
    config.seed = o.value("seed", config.seed);
    config.tau = o.value("tau", config.tau);
    const zwl::WindowCountStats stats = zwl::run_ensemble(config, workers);
    json j;
    j["config"] = json::parse(zwl::to_json(config));
    j["stats"] = json::parse(zwl::to_json(stats));
    if (counts_csv) {
      std::ostringstream csv;
      csv << "sample,count\n";
      for (std::size_t i = 0; i < stats.counts.size(); ++i) csv << i << ',' << stats.counts[i] << '\n';
      *counts_csv = dup_string(csv.str());
    }
    *json_out = dup_string(j.dump());
  });
}

}  // extern "C"
