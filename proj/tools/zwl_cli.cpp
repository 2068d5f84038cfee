// zwl command-line front end. Talks to the library only through zwl.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zwl/zwl.h"

using nlohmann::json;

namespace {

struct Failure {
  zwl_status status;
  std::string message;
};

// 1 invalid configuration, 2 computation failure, 3 invariant violation.
int exit_code(zwl_status s) {
  switch (s) {
    case ZWL_OK: return 0;
    case ZWL_ERR_INVARIANT: return 3;
    case ZWL_ERR_COMPUTATION:
    case ZWL_ERR_OVERFLOW:
    case ZWL_ERR_NOT_CONVERGED:
    case ZWL_ERR_INTERNAL: return 2;
    default: return 1;
  }
}

void check(zwl_status s) {
  if (s != ZWL_OK) throw Failure{s, zwl_last_error()};
}

void invalid(const std::string& message) { throw Failure{ZWL_ERR_INVALID_ARGUMENT, message}; }

std::string take(char* s) {
  std::string out = s ? s : "";
  zwl_string_free(s);
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{ZWL_ERR_IO, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FamilyHandle {
  zwl_family* p = nullptr;
  ~FamilyHandle() { zwl_family_free(p); }
};
struct FunctionHandle {
  zwl_test_function* p = nullptr;
  ~FunctionHandle() { zwl_test_function_free(p); }
};
struct CacheHandle {
  zwl_trace_cache* p = nullptr;
  ~CacheHandle() { zwl_trace_cache_free(p); }
};

struct Global {
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

class Emitter {
 public:
  Emitter(const Global& g, std::string command, json config) : g_(g), command_(std::move(command)) {
    config["command"] = command_;
    config_ = std::move(config);
    if (!g_.out.empty()) std::filesystem::create_directories(g_.out);
  }

  bool wants_json() const { return g_.format == "json" || g_.format == "both"; }
  bool wants_csv() const { return g_.format == "csv" || g_.format == "both"; }

  void json_artifact(json body, const std::string& suffix = "") {
    if (!wants_json()) return;
    json doc;
    doc["version"] = zwl_version();
    doc["config"] = config_;
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(command_ + suffix + ".json", doc.dump(2) + "\n");
  }

  void csv_artifact(const std::string& header, const std::vector<std::vector<std::string>>& rows,
                    const std::string& suffix = "", bool force = false) {
    if (!wants_csv() && !force) return;
    std::ostringstream s;
    s << "# version: " << zwl_version() << "\n# config: " << config_.dump() << "\n" << header << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
      s << "\n";
    }
    write(command_ + suffix + ".csv", s.str());
  }

 private:
  void write(const std::string& name, const std::string& text) {
    if (g_.out.empty()) {
      std::cout << text;
      return;
    }
    const auto path = std::filesystem::path(g_.out) / name;
    std::ofstream f(path);
    if (!f) throw Failure{ZWL_ERR_IO, "cannot write " + path.string()};
    f << text;
    std::cerr << "wrote " << path.string() << "\n";
  }

  const Global& g_;
  std::string command_;
  json config_;
};

// Summaries go to stdout when artifacts go to files, to stderr otherwise.
std::ostream& summary(const Global& g) { return g.out.empty() ? std::cerr : std::cout; }

json family_config(const std::string& path, zwl_family* family) {
  json j = json::parse(take([&] {
    char* s = nullptr;
    check(zwl_family_describe(family, &s));
    return s;
  }()));
  return {{"path", path}, {"spec", j["spec"]}, {"fingerprint", j["fingerprint"]}};
}

void load_family(const std::string& path, const std::string& conductors, FamilyHandle& h) {
  check(zwl_family_from_json(read_file(path).c_str(), &h.p));
  if (!conductors.empty()) check(zwl_family_load_conductors(h.p, conductors.c_str()));
}

json h_descriptor(const std::string& kind, const std::vector<std::string>& q, const std::string& bump_a) {
  if (kind == "poly") return {{"kind", "even_polynomial"}, {"q", q.empty() ? std::vector<std::string>{"1"} : q}};
  if (kind == "bump") return {{"kind", "bump"}, {"a", bump_a}};
  invalid("unknown profile kind '" + kind + "' (use poly or bump)");
  return {};
}

// ---------------------------------------------------------------- commands

struct DensityArgs {
  std::string family;
  std::int64_t R = 0;
  double sigma = 0.3;
  std::string normalization = "global";
  std::optional<double> a, b;
  double kappa = 1.0;
  std::string conductors;
  std::string cache;
  std::string phi = "fejer";
  std::vector<std::string> q;
  std::string bump_a = "1";
  std::optional<double> tau;
};

int cmd_density(const Global& g, const DensityArgs& args) {
  FamilyHandle fam;
  load_family(args.family, args.conductors, fam);
  json fn_desc;
  if (args.phi == "fejer") {
    fn_desc = {{"kind", "fejer"}, {"sigma", args.sigma}};
  } else {
    fn_desc = h_descriptor(args.phi, args.q, args.bump_a);
    fn_desc["sigma"] = args.sigma;
    if (args.tau) fn_desc["tau"] = *args.tau;
  }
  FunctionHandle fn;
  check(zwl_test_function_from_json(fn_desc.dump().c_str(), &fn.p));
  CacheHandle cache;
  if (!args.cache.empty()) check(zwl_trace_cache_load(args.cache.c_str(), fam.p, &cache.p));

  json options = {{"R", args.R}, {"normalization", args.normalization}, {"kappa", args.kappa},
                  {"workers", g.workers}, {"ladder", g.format != "json"}};
  if (args.a) options["a"] = *args.a;
  if (args.b) options["b"] = *args.b;
  char* out = nullptr;
  check(zwl_density(fam.p, fn.p, options.dump().c_str(), cache.p, &out));
  json result = json::parse(take(out));

  const json& rep = result["report"];
  const json& t = rep["terms"];
  const double recomposed = t["phihat0"].get<double>() + t["phi0"].get<double>() -
                            2.0 * t["first_sum"].get<double>() - 2.0 * t["second_sum"].get<double>();
  if (recomposed != rep["value"].get<double>()) throw Failure{ZWL_ERR_INVARIANT, "density does not recompose from its terms"};

  json config = {{"family", family_config(args.family, fam.p)},
                 {"R", args.R},
                 {"test_function", result["test_function"]},
                 {"normalization", args.normalization},
                 {"a", args.a ? json(*args.a) : json(nullptr)},
                 {"b", args.b ? json(*args.b) : json(nullptr)},
                 {"kappa", args.kappa},
                 {"conductors", args.conductors},
                 {"cache", args.cache}};
  Emitter emit(g, "density", config);
  emit.json_artifact({{"report", rep}, {"diagnostics", result["diagnostics"]}});
  if (result.contains("convergence")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : result["convergence"])
      rows.push_back({std::to_string(r["R"].get<std::int64_t>()), num(r["value"]), num(r["prediction"]),
                      num(r["discrepancy"])});
    emit.csv_artifact("R,value,prediction,discrepancy", rows);
  }
  for (const auto& w : result["diagnostics"]["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  auto& s = summary(g);
  const double value = rep["value"], prediction = rep["prediction"];
  s << "normalization " << args.normalization << ", R = " << args.R << ", members = "
    << result["diagnostics"]["family_size"] << "\n"
    << "value        " << num(value) << "\n"
    << "prediction   " << num(prediction) << "  (a = " << num(rep["model_a"]) << ", b = " << num(rep["model_b"]) << ")\n"
    << "|value - prediction| = " << num(std::abs(value - prediction)) << "\n"
    << "error budget " << num(t["error_budget"]) << "\n";
  return 0;
}

int cmd_optimize(const Global& g, int n, int starts) {
  json options = {{"starts", starts}, {"workers", g.workers}};
  char* out = nullptr;
  check(zwl_optimize(n, options.dump().c_str(), &out));
  json result = json::parse(take(out));
  check(zwl_scan_candidates(&out));
  json candidates = json::parse(take(out));

  Emitter emit(g, "optimize", {{"n", n}, {"starts", starts}});
  emit.json_artifact({{"optimum", result["optimum"]}, {"reference", result.contains("reference") ? result["reference"] : json(nullptr)},
                      {"candidates", candidates}});
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : candidates) rows.push_back({c["name"].get<std::string>(), "\"" + c["h"].get<std::string>() + "\"", num(c["C"])});
  emit.csv_artifact("name,h,C", rows);

  auto& s = summary(g);
  const json& opt = result["optimum"];
  s << "optimum for n = " << n << ":";
  for (std::size_t i = 0; i < opt["coefficients"].size(); ++i)
    s << "  a" << 2 * (i + 1) << " = " << num(opt["coefficients"][i]);
  s << "  C = " << num(opt["C"]) << (opt["monotone"].get<bool>() ? "" : "  (not monotone)") << "\n\n";
  s << "profile                              C(h)\n";
  for (const auto& c : candidates) {
    std::string h = c["h"];
    s << h << std::string(h.size() < 36 ? 37 - h.size() : 1, ' ') << num(c["C"]) << "\n";
  }
  return 0;
}

struct BoundsArgs {
  int r = 0;
  double sigma = 1.0;
  std::optional<double> a, b, tau, tau_lower;
  std::string h = "poly";
  std::vector<std::string> q;
  std::string bump_a = "1";
};

int cmd_bounds(const Global& g, const BoundsArgs& args) {
  json options = {{"h", h_descriptor(args.h, args.q, args.bump_a)}};
  if (args.a) options["a"] = *args.a;
  if (args.b) options["b"] = *args.b;
  if (args.tau) options["tau"] = *args.tau;
  if (args.tau_lower) options["tau_lower"] = *args.tau_lower;
  char* out = nullptr;
  check(zwl_bounds(args.r, args.sigma, options.dump().c_str(), &out));
  json result = json::parse(take(out));
  json config = options;
  config["r"] = args.r;
  config["sigma"] = args.sigma;
  Emitter emit(g, "bounds", config);
  json body = result;
  body.erase("table");
  emit.json_artifact({{"bounds", body}});
  emit.csv_artifact("r,sigma,tau_lower,tau,lower,rmt,upper,tau_bsd,C_h",
                    {{std::to_string(args.r), num(args.sigma), num(result["tau_lower"]), num(result["tau"]),
                      num(result["lower"]), num(result["rmt"]), num(result["upper"]), num(result["tau_bsd"]),
                      num(result["C_h"])}});
  summary(g) << result["table"].get<std::string>();
  const bool defaults = !args.a && !args.b && !args.tau && !args.tau_lower;
  if (defaults && !result["sandwich_ok"].get<bool>())
    throw Failure{ZWL_ERR_INVARIANT, "lower <= rmt <= upper fails at default settings"};
  return 0;
}

struct SimulateArgs {
  int N = 60;
  std::string parity = "mixed";
  int r = 0;
  std::int64_t samples = 20000;
  double tau = 1.0;
  bool counts = false;
};

int cmd_simulate(const Global& g, const SimulateArgs& args) {
  json config = {{"N", args.N}, {"parity", args.parity}, {"r", args.r},
                 {"samples", args.samples}, {"seed", g.seed}, {"tau", args.tau}};
  char* out = nullptr;
  char* csv = nullptr;
  check(zwl_simulate(config.dump().c_str(), g.workers, &out, args.counts ? &csv : nullptr));
  json result = json::parse(take(out));
  std::string counts = take(csv);
  Emitter emit(g, "simulate", config);
  emit.json_artifact({{"stats", result["stats"]}});
  std::vector<std::vector<std::string>> rows;
  for (const auto& h : result["stats"]["histogram"])
    rows.push_back({std::to_string(h["count"].get<int>()), std::to_string(h["frequency"].get<std::int64_t>())});
  emit.csv_artifact("count,frequency", rows);
  if (args.counts) {
    std::vector<std::vector<std::string>> sample_rows;
    std::istringstream lines(counts);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      auto comma = line.find(',');
      sample_rows.push_back({line.substr(0, comma), line.substr(comma + 1)});
    }
    emit.csv_artifact("sample,count", sample_rows, "_counts", true);
  }
  const json& s = result["stats"];
  summary(g) << "mean " << num(s["mean"]) << " +- " << num(s["stderr"]) << "  prediction " << num(s["prediction"])
             << "  min count " << s["min_count"] << "\n";
  return 0;
}

int cmd_sieve(const Global& g, const std::string& family_path, std::int64_t R, const std::string& conductors) {
  FamilyHandle fam;
  load_family(family_path, conductors, fam);
  char* out = nullptr;
  check(zwl_family_sieve(fam.p, R, g.workers, &out));
  json result = json::parse(take(out));
  check(zwl_family_describe(fam.p, &out));
  json described = json::parse(take(out));
  Emitter emit(g, "sieve", {{"family", family_config(family_path, fam.p)}, {"R", R}, {"conductors", conductors}});
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : result["members"]) {
    double log_n = 0.0;
    check(zwl_family_log_conductor(fam.p, t.get<std::int64_t>(), &log_n));
    rows.push_back({std::to_string(t.get<std::int64_t>()), num(log_n)});
  }
  emit.json_artifact({{"sieve", result}, {"D", described["D"]}, {"deg_D", described["deg_D"]}});
  emit.csv_artifact("t,log_conductor", rows);
  summary(g) << "D(T) coefficients " << described["D"].dump() << ", " << result["size"] << " members in ["
             << R << ", " << 2 * R << "], " << result["singular_skipped"] << " singular t skipped\n";
  return 0;
}

struct CacheArgs {
  std::string family;
  std::int64_t R = 0;
  std::int64_t prime_limit = 1000;
  std::string scope = "sieved";
  std::string path;
  std::string inspect;
  std::string conductors;
};

int cmd_cache(const Global& g, const CacheArgs& args) {
  CacheHandle cache;
  FamilyHandle fam;
  json config;
  if (!args.inspect.empty()) {
    if (!args.family.empty()) load_family(args.family, "", fam);
    check(zwl_trace_cache_load(args.inspect.c_str(), fam.p, &cache.p));
    config = {{"inspect", args.inspect}, {"family", args.family}};
  } else {
    if (args.family.empty() || args.path.empty() || args.R < 1) invalid("cache needs --family, --R and --cache (or --inspect FILE)");
    load_family(args.family, "", fam);
    check(zwl_trace_cache_build(fam.p, args.R, args.prime_limit, args.scope.c_str(), g.workers, &cache.p));
    check(zwl_trace_cache_save(cache.p, args.path.c_str()));
    config = {{"family", family_config(args.family, fam.p)}, {"R", args.R}, {"prime_limit", args.prime_limit},
              {"scope", args.scope}, {"cache", args.path}};
  }
  char* out = nullptr;
  check(zwl_trace_cache_info(cache.p, &out));
  json info = json::parse(take(out));
  Emitter emit(g, "cache", config);
  emit.json_artifact({{"cache", info}});
  emit.csv_artifact("fingerprint,R,prime_limit,scope,members,primes",
                    {{info["fingerprint"].get<std::string>(), std::to_string(info["R"].get<std::int64_t>()),
                      std::to_string(info["prime_limit"].get<std::int64_t>()), info["scope"].get<std::string>(),
                      std::to_string(info["members"].get<std::int64_t>()), std::to_string(info["primes"].get<std::int64_t>())}});
  summary(g) << "trace cache: " << info["members"] << " members x " << info["primes"] << " primes, fingerprint "
             << info["fingerprint"].get<std::string>() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zwl: low-lying zeros of elliptic curve families"};
  app.set_version_flag("--version", std::string(zwl_version()));
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for the random matrix ensembles");
  app.add_option("--out", g.out, "Directory for output artifacts (stdout when omitted)");
  app.add_option("--format", g.format, "Artifacts to emit")->check(CLI::IsMember({"json", "csv", "both"}));

  DensityArgs dens;
  auto* density = app.add_subcommand("density", "Averaged explicit-formula density of a family.\n"
                                                "CSV columns: R,value,prediction,discrepancy");
  density->add_option("--family", dens.family, "Family spec JSON")->required();
  density->add_option("--R", dens.R, "Family parameter range [R, 2R]")->required()->check(CLI::PositiveNumber);
  density->add_option("--sigma", dens.sigma, "Support of phi-hat");
  density->add_option("--normalization", dens.normalization)->check(CLI::IsMember({"local", "global"}));
  density->add_option("--a", dens.a, "Model coefficient of phi(0) (default r + 1/2)");
  density->add_option("--b", dens.b, "Model coefficient of phi-hat(0) (default 1)");
  density->add_option("--kappa", dens.kappa, "Error budget constant");
  density->add_option("--conductors", dens.conductors, "CSV t,conductor overriding the conductor proxy");
  density->add_option("--cache", dens.cache, "Trace cache to read");
  density->add_option("--phi", dens.phi, "fejer, poly or bump")->check(CLI::IsMember({"fejer", "poly", "bump"}));
  density->add_option("--q", dens.q, "q coefficients of h = (1-x^2) q(x^2)")->delimiter(',');
  density->add_option("--bump-a", dens.bump_a, "Parameter of exp(-a/(1-x^2))");
  density->add_option("--tau", dens.tau, "tau of phi built from h (default 1/(pi C sigma))");

  int opt_n = 2, opt_starts = 25;
  auto* optimize = app.add_subcommand("optimize", "Maximize C(h_n) and compare with standard profiles.\n"
                                                  "CSV columns: name,h,C");
  optimize->add_option("--n", opt_n, "Number of free coefficients")->check(CLI::Range(1, 6));
  optimize->add_option("--starts", opt_starts, "Multi-start lattice size")->check(CLI::PositiveNumber);

  BoundsArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "Lower, random-matrix and upper window counts.\n"
                                              "CSV columns: r,sigma,tau_lower,tau,lower,rmt,upper,tau_bsd,C_h");
  bounds->add_option("--r", bnd.r, "Family rank")->check(CLI::NonNegativeNumber);
  bounds->add_option("--sigma", bnd.sigma, "Support of phi-hat")->check(CLI::PositiveNumber);
  bounds->add_option("--a", bnd.a);
  bounds->add_option("--b", bnd.b);
  bounds->add_option("--tau", bnd.tau, "Window for rmt and upper (default 1/(2 sigma))");
  bounds->add_option("--tau-lower", bnd.tau_lower, "Window for lower (default tau_BSD)");
  bounds->add_option("--profile", bnd.h, "h profile: poly or bump")->check(CLI::IsMember({"poly", "bump"}));
  bounds->add_option("--q", bnd.q, "q coefficients of h = (1-x^2) q(x^2)")->delimiter(',');
  bounds->add_option("--bump-a", bnd.bump_a);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Window counts of random orthogonal matrices.\n"
                                                  "CSV columns: count,frequency (histogram); sample,count (--counts)");
  simulate->add_option("--N", sim.N, "Size of the random block");
  simulate->add_option("--parity", sim.parity)->check(CLI::IsMember({"even", "odd", "mixed"}));
  simulate->add_option("--r", sim.r, "Forced eigenvalues at 1")->check(CLI::NonNegativeNumber);
  simulate->add_option("--samples", sim.samples)->check(CLI::PositiveNumber);
  simulate->add_option("--tau", sim.tau)->check(CLI::NonNegativeNumber);
  simulate->add_flag("--counts", sim.counts, "Also emit per-sample counts");

  std::string sieve_family;
  std::int64_t sieve_R = 0;
  std::string sieve_conductors;
  auto* sieve = app.add_subcommand("sieve", "Members of the sieved family in [R, 2R].\nCSV columns: t,log_conductor");
  sieve->add_option("--family", sieve_family)->required();
  sieve->add_option("--R", sieve_R)->required()->check(CLI::PositiveNumber);
  sieve->add_option("--conductors", sieve_conductors);

  CacheArgs ca;
  auto* cache = app.add_subcommand("cache", "Build or inspect a trace cache.\n"
                                            "CSV columns: fingerprint,R,prime_limit,scope,members,primes");
  cache->add_option("--family", ca.family);
  cache->add_option("--R", ca.R);
  cache->add_option("--prime-limit", ca.prime_limit);
  cache->add_option("--scope", ca.scope, "sieved (local) or all (global)")->check(CLI::IsMember({"sieved", "all"}));
  cache->add_option("--cache", ca.path, "Output file");
  cache->add_option("--inspect", ca.inspect, "Verify and describe an existing cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*density) return cmd_density(g, dens);
    if (*optimize) return cmd_optimize(g, opt_n, opt_starts);
    if (*bounds) return cmd_bounds(g, bnd);
    if (*simulate) return cmd_simulate(g, sim);
    if (*sieve) return cmd_sieve(g, sieve_family, sieve_R, sieve_conductors);
    if (*cache) return cmd_cache(g, ca);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return exit_code(f.status);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
