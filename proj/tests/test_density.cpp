#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "zwl/bounds.hpp"
#include "zwl/density.hpp"
#include "zwl/error.hpp"
#include "zwl/optimize.hpp"
#include "oracles.hpp"

using namespace zwl;

namespace {

FamilySpec spec_of(std::vector<BigInt> a, std::vector<BigInt> b) {
  FamilySpec s;
  s.A = std::move(a);
  s.B = std::move(b);
  return s;
}

Family reference_family() { return Family(spec_of({1}, {0, 1})); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

// Unit-height triangle of half-width sigma scaled by 1/sigma.
double triangle(double y, double sigma) { return std::max(0.0, 1.0 - std::fabs(y) / sigma) / sigma; }

std::vector<TraceRecord> traces_of(const EllipticCurve& e, std::int64_t limit) {
  std::vector<TraceRecord> out;
  for (auto p : primes_up_to(limit).primes)
    if (p > 3) out.push_back(trace_of_frobenius(e, p));
  return out;
}

EvenTestFunction sum_of(const EvenTestFunction& f, const EvenTestFunction& g) {
  EvenTestFunction out;
  out.name = "sum";
  out.sigma = std::max(f.sigma, g.sigma);
  out.phi = [=](double x) { return f.phi(x) + g.phi(x); };
  out.phihat = [=](double y) { return f.phihat(y) + g.phihat(y); };
  return out;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("kernels") {
  CHECK(kernel_hat(Group::SO, 0).bounded_part(7.3) == 0.5);
  CHECK(kernel_hat(Group::SOodd, 0).bounded_part(0.5) == 0.5);
  CHECK(kernel_hat(Group::SOodd, 0).bounded_part(2.0) == 1.0);
  CHECK(kernel_hat(Group::SOeven, 2).bounded_part(0.5) == 2.5);
  CHECK(kernel_hat(Group::SOeven, 2).bounded_part(1.5) == 2.0);
  CHECK(kernel_hat(Group::USp, 0).bounded_part(0.5) == -0.5);
  CHECK(kernel_hat(Group::USp, 0).bounded_part(1.5) == 0.0);
  CHECK(kernel_hat(Group::U, 0).bounded_part(0.2) == 0.0);
  for (auto g : {Group::U, Group::USp, Group::SO, Group::SOeven, Group::SOodd}) {
    CHECK(kernel_hat(g, 0).delta_coefficient == 1.0);
    CHECK(group_from_string(to_string(g)) == g);
  }
  CHECK(code_of([] { kernel_hat(Group::U, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { kernel_hat(Group::USp, 2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { group_from_string("GL"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("predicted density examples") {
  const auto psi = fejer(1.0).as_test_function();
  CHECK(predicted_density(psi, kernel_hat(Group::SOeven, 0)) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(predicted_density(psi, kernel_hat(Group::U, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(predicted_density(psi, kernel_hat(Group::SO, 1)) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("orthogonal kernels agree for small support") {
  const auto h2 = reference_optimal_h2();
  std::vector<EvenTestFunction> fns = {fejer(0.4).as_test_function(), fejer(0.9).as_test_function(),
                                       build_phi(h2, 0.5, tau_bsd(h2, 0.5)).as_test_function(),
                                       build_phi(TestFunctionH::even_polynomial({Rational(1)}), 1.0 / 3.0,
                                                 0.8).as_test_function()};
  for (const auto& fn : fns) {
    for (int r = 0; r <= 2; ++r) {
      const double so = predicted_density(fn, kernel_hat(Group::SO, r));
      CHECK(so == doctest::Approx((r + 0.5) * fn.phi(0.0) + fn.phihat(0.0)).epsilon(1e-9));
      CHECK(std::fabs(predicted_density(fn, kernel_hat(Group::SOeven, r)) - so) <= 1e-10);
      CHECK(std::fabs(predicted_density(fn, kernel_hat(Group::SOodd, r)) - so) <= 1e-10);
    }
  }
}

TEST_CASE("single prime by hand") {
  const double sigma = 0.3;
  const auto psi = fejer(sigma).as_test_function();
  const double log_n = std::log(368.0);
  const std::vector<TraceRecord> traces = {{5, -2, Reduction::Good}};
  const double u = std::log(5.0) / log_n;
  REQUIRE(u < sigma);
  REQUIRE(2.0 * u > sigma);
  const double expect = triangle(0.0, sigma) + 1.0 - 2.0 * (-2.0 * std::log(5.0) / (5.0 * log_n)) * triangle(u, sigma);
  CHECK(std::fabs(curve_ef_sum(traces, psi, log_n) - expect) <= 1e-12);

  const auto terms = curve_ef_terms(traces, psi, log_n);
  CHECK(terms.second_sum == 0.0);
  CHECK(terms.value() == curve_ef_sum(traces, psi, log_n));

  CHECK(code_of([&] { curve_ef_sum({}, psi, log_n); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { curve_ef_sum(traces, psi, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("zero traces and linearity") {
  const auto f = fejer(0.3).as_test_function();
  const auto g = build_phi(reference_optimal_h2(), 0.2, 2.0).as_test_function();
  const double log_n = 20.0;

  auto zeros = traces_of(EllipticCurve(1, 3), 1000);
  for (auto& t : zeros) t.a_p = 0;
  CHECK(curve_ef_sum(zeros, f, log_n) == f.phihat(0.0) + f.phi(0.0));

  const auto traces = traces_of(EllipticCurve(1, 3), 1000);
  const double lhs = curve_ef_sum(traces, sum_of(f, g), log_n);
  const double rhs = curve_ef_sum(traces, f, log_n) + curve_ef_sum(traces, g, log_n);
  CHECK(std::fabs(lhs - rhs) <= 1e-12);

  TraceTable table;
  table.members = {1, 2, 3};
  for (auto p : primes_up_to(1000).primes)
    if (p > 3) table.primes.push_back(p);
  table.traces.assign(table.members.size() * table.primes.size(), 0);
  const std::vector<double> logs = {10.0, 15.0, 20.0};
  CHECK(average_terms(table, logs, f).value() == f.phihat(0.0) + f.phi(0.0));
  CHECK(code_of([&] { average_terms(table, std::vector<double>{1.0}, f); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { average_terms(table, std::vector<double>{30.0, 30.0, 30.0}, f); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("first moments") {
  const Family a(spec_of({1}, {0, 1}));
  const Family b(spec_of({0, 1}, {1}));
  for (auto p : primes_up_to(100).primes) {
    if (p <= 3) continue;
    CHECK(first_moment(a, p) == 0);
    CHECK(first_moment(b, p) == -p);
  }
  for (std::int64_t p : {5, 7, 11, 13}) {
    std::int64_t sa = 0, sb = 0;
    for (std::int64_t t = 0; t < p; ++t) {
      sa += oracle::brute_force_trace(1, t, p);
      sb += oracle::brute_force_trace(t, 1, p);
    }
    CHECK(first_moment(a, p) == sa);
    CHECK(first_moment(b, p) == sb);
  }
  CHECK(code_of([&] { first_moment(a, 3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { first_moment(a, 9); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("family density") {
  const auto f = reference_family();
  const auto psi = fejer(0.3).as_test_function();
  DensityDiagnostics diag;
  const auto rep = one_level_density(f, 500, psi, Normalization::Global, {}, &diag);
  CHECK(rep.value == rep.terms.value());
  CHECK(rep.model_a == 0.5);
  CHECK(rep.model_b == 1.0);
  CHECK(rep.prediction == doctest::Approx(0.5 * psi.phi(0.0) + psi.phihat(0.0)).epsilon(1e-15));
  CHECK(rep.terms.error_budget == doctest::Approx(std::log(std::log(500.0)) / std::log(500.0)).epsilon(1e-15));
  CHECK(diag.family_size == 501);
  CHECK(diag.mean_log_conductor == avg_log_conductor(f, 500));
  CHECK(diag.warnings.empty());

  DensityOptions opts;
  opts.kappa = 2.0;
  opts.model_b = 0.5;
  const auto rep2 = one_level_density(f, 500, psi, Normalization::Global, opts);
  CHECK(rep2.value == rep.value);
  CHECK(rep2.terms.error_budget == 2.0 * rep.terms.error_budget);
  CHECK(rep2.prediction == doctest::Approx(0.5 * psi.phi(0.0) + 0.5 * psi.phihat(0.0)));

  const auto local = one_level_density(f, 500, psi, Normalization::Local);
  CHECK(local.value == local.terms.value());
  CHECK(std::fabs(local.value - rep.value) < 1.0);

  const auto json = nlohmann::json::parse(to_json(rep));
  for (const char* key : {"normalization", "R", "sigma", "value", "terms", "prediction", "model_a", "model_b"})
    CHECK(json.contains(key));
  CHECK(json.size() == 8);
  CHECK(json["terms"].size() == 5);
}

TEST_CASE("local equals global on a constant discriminant") {
  const Family f(spec_of({-1}, {1}));
  const auto psi = fejer(0.3).as_test_function();
  const auto g = one_level_density(f, 200, psi, Normalization::Global);
  const auto l = one_level_density(f, 200, psi, Normalization::Local);
  CHECK(std::fabs(g.value - l.value) <= 1e-12);
}

TEST_CASE("worker count does not change results") {
  const auto f = reference_family();
  const auto psi = fejer(0.3).as_test_function();
  for (auto norm : {Normalization::Global, Normalization::Local}) {
    DensityOptions one, four;
    four.workers = 4;
    const auto a = one_level_density(f, 700, psi, norm, one);
    const auto b = one_level_density(f, 700, psi, norm, four);
    CHECK(to_json(a) == to_json(b));
  }
}

TEST_CASE("cache reuse") {
  const auto f = reference_family();
  const auto psi = fejer(0.3).as_test_function();
  const auto fresh = one_level_density(f, 400, psi, Normalization::Local);
  const auto cache = build_trace_cache(f, 400, 200);
  DensityOptions opts;
  opts.cache = &cache;
  DensityDiagnostics diag;
  const auto cached = one_level_density(f, 400, psi, Normalization::Local, opts, &diag);
  CHECK(diag.used_cache);
  CHECK(to_json(cached) == to_json(fresh));

  CHECK(code_of([&] { one_level_density(f, 300, psi, Normalization::Local, opts); }) == ErrorCode::CacheMismatch);
  const Family other(spec_of({0, 1}, {1}));
  CHECK(code_of([&] { one_level_density(other, 400, psi, Normalization::Local, opts); }) ==
        ErrorCode::CacheMismatch);
  const auto small = build_trace_cache(f, 400, 10);
  opts.cache = &small;
  CHECK(code_of([&] { one_level_density(f, 400, psi, Normalization::Local, opts); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("rejections and warnings") {
  const auto f = reference_family();
  CHECK(code_of([&] { one_level_density(f, 100, fejer(1.0).as_test_function(), Normalization::Global); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { one_level_density(f, 0, fejer(0.3).as_test_function(), Normalization::Global); }) ==
        ErrorCode::InvalidArgument);

  DensityDiagnostics diag;
  one_level_density(f, 100, fejer(0.4).as_test_function(), Normalization::Global, {}, &diag);
  CHECK(support_limit(2) == doctest::Approx(1.0 / 3.0));
  CHECK(support_limit(1) == 0.5);
  CHECK(diag.warnings.size() == 1);

  // t = 4 t' is never square-free.
  auto s = spec_of({0}, {0, 1});
  s.sieve_c = 4;
  CHECK(code_of([&] { one_level_density(Family(s), 100, fejer(0.3).as_test_function(), Normalization::Local); }) ==
        ErrorCode::EmptyFamily);
}

TEST_CASE("ladder") {
  CHECK(dyadic_ladder(5000) == std::vector<std::int64_t>{39, 78, 156, 312, 625, 1250, 2500, 5000});
  CHECK(dyadic_ladder(100) == std::vector<std::int64_t>{50, 100});
  CHECK(dyadic_ladder(20) == std::vector<std::int64_t>{20});
  const auto f = reference_family();
  const auto psi = fejer(0.3).as_test_function();
  const std::vector<std::int64_t> ladder = {100, 200};
  const auto rows = convergence_rows(f, ladder, psi, Normalization::Global);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) CHECK(row.discrepancy == doctest::Approx(std::fabs(row.value - row.prediction)));
}

}  // TEST_SUITE
