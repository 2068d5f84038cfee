// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-zwl-cli> <scratch-dir>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zwl/bounds.hpp"
#include "zwl/curves.hpp"
#include "zwl/density.hpp"
#include "zwl/family.hpp"
#include "zwl/optimize.hpp"
#include "zwl/rmtsim.hpp"
#include "zwl/testfunc.hpp"
#include "oracles.hpp"

using namespace zwl;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%.2f s)%s\n", id, out.pass ? "PASS" : "FAIL", title.c_str(), secs,
              out.detail.str().c_str());
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

FamilySpec spec_of(std::vector<BigInt> a, std::vector<BigInt> b) {
  FamilySpec s;
  s.A = std::move(a);
  s.B = std::move(b);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <zwl-cli> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];

  criterion(1, "C(h) catalog", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
      TestFunctionH h;
      double expect;
    };
    const std::vector<Row> rows = {
        {TestFunctionH::even_polynomial({Rational(1)}), 0.632456},
        {TestFunctionH::even_polynomial({Rational(1), Rational(-1)}), 0.57735},
        {TestFunctionH::bump(Rational(1)), 0.570024},
        {TestFunctionH::bump(parse_rational("0.754212")), 0.575629},
    };
    for (const auto& r : rows) {
      const double c = c_of_h(r.h);
      o.detail << " " << r.h.describe() << "=" << fmt(c);
      o.require(std::fabs(c - r.expect) <= 1e-4, r.h.describe());
    }
    o.require(elapsed_since(t0) < 1.0, "runtime < 1 s");
  });

  criterion(2, "n = 2 optimization", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = maximize_c(2);
    o.detail << " a2=" << fmt(r.coefficients.at(0)) << " a4=" << fmt(r.coefficients.at(1))
             << " C=" << fmt(r.c_value);
    o.require(std::fabs(r.coefficients[0] + 0.233428) <= 2e-3, "a2");
    o.require(std::fabs(r.coefficients[1] - 0.0189588) <= 2e-3, "a4");
    o.require(std::fabs(r.c_value - 0.63662) <= 1e-4, "C");
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double c[] = {u(rng), u(rng)};
      worst = std::max(worst, std::fabs(objective(2, c) - objective_n2_closed_form(c[0], c[1])));
    }
    o.detail << " max route gap=" << fmt(worst);
    o.require(worst <= 1e-12, "closed form vs exact route");
    o.require(elapsed_since(t0) < 60.0, "runtime < 1 min");
  });

  criterion(3, "Fejer identities", [](Outcome& o) {
    for (double sigma : {1.0 / 3.0, 0.5, 1.0, 2.0}) {
      const FejerPsi psi(sigma);
      const double a = psi.psi_at(1.0 / (2.0 * sigma)) * pi * pi / 4.0;
      o.require(std::fabs(a - 1.0) <= 1e-12, "psi(1/(2 sigma)) pi^2/4 at sigma=" + fmt(sigma));
      o.require(sigma * psi.psihat_at(0.0) == 1.0, "sigma psihat(0) at sigma=" + fmt(sigma));
    }
  });

  criterion(4, "sandwich grid", [](Outcome& o) {
    const auto h = reference_optimal_h2();
    for (int r = 0; r <= 3; ++r) {
      for (double sigma : {0.2, 1.0 / 3.0, 0.49}) {
        const auto b = sandwich(r, sigma, h, FejerPsi(sigma));
        const std::string at = " at r=" + std::to_string(r) + " sigma=" + fmt(sigma);
        o.require(std::fabs(b.lower - (r + 0.5)) <= 1e-12, "lower" + at);
        o.require(std::fabs(b.rmt - (r + 0.5 + 1.0 / sigma)) <= 1e-12, "rmt" + at);
        const double up = pi * pi / 4.0 * (r + 0.5 + 1.0 / sigma);
        o.require(std::fabs(b.upper - up) <= 1e-12 * up, "upper" + at);
        o.require(b.sandwich_ok && b.lower <= b.rmt && b.rmt <= b.upper, "ordering" + at);
      }
    }
    const auto spot = sandwich(0, 1.0, h, FejerPsi(1.0));
    o.detail << " r=0 sigma=1: " << fmt(spot.lower) << " <= " << fmt(spot.rmt) << " <= " << fmt(spot.upper);
    o.require(spot.lower <= 0.5 + 1e-12 && std::fabs(spot.rmt - 1.5) <= 1e-12, "spot lower/rmt");
    o.require(std::fabs(spot.upper - 3.7011) <= 1e-4, "spot upper");
  });

  criterion(5, "phi construction invariants", [](Outcome& o) {
    double worst_ft = 0.0, worst_ratio = 0.0;
    for (const auto& h : {TestFunctionH::even_polynomial({Rational(1)}), reference_optimal_h2()}) {
      for (double sigma : {1.0 / 3.0, 1.0}) {
        const double tb = tau_bsd(h, sigma);
        for (double tau : {tb, 1.5 * tb}) {
          const TestFunctionPhi phi = build_phi(h, sigma, tau);
          const std::string at = " for " + h.describe() + " sigma=" + fmt(sigma) + " tau=" + fmt(tau);
          const double phi0 = phi.phi_at(0.0);
          bool sign_ok = true, max_ok = true;
          for (int i = -2000; i <= 2000; ++i) {
            const double x = 10.0 * tau * i / 2000.0;
            const double v = phi.phi_at(x);
            if (v * (tau - std::fabs(x)) < -1e-15) sign_ok = false;
            if (v > phi0) max_ok = false;
          }
          o.require(sign_ok, "sign pattern" + at);
          o.require(max_ok, "maximum at 0" + at);
          oracle::CosineTransform ft([&](double x) { return phi.phi_at(x); }, 3000.0, 0.25);
          for (double f : {1.05, 1.2, 1.5, 2.0, 3.0, 5.0}) worst_ft = std::max(worst_ft, std::fabs(ft(f * sigma)));
          const double gap = std::fabs(phi.phihat_at(0.0) / phi0 - ratio_phihat0_phi0(h, sigma, tau));
          worst_ratio = std::max(worst_ratio, gap);
          o.require(gap <= 1e-8, "ratio" + at);
        }
      }
    }
    o.detail << " max |FT| outside support=" << fmt(worst_ft) << " max ratio gap=" << fmt(worst_ratio);
    o.require(worst_ft <= 1e-6, "transform outside support");
  });

  criterion(6, "number-theory kernel", [](Outcome& o) {
    std::mt19937_64 rng(6);
    auto draw = [&](std::int64_t range) {
      for (;;) {
        const std::int64_t a = static_cast<std::int64_t>(rng() % (2 * range + 1)) - range;
        const std::int64_t b = static_cast<std::int64_t>(rng() % (2 * range + 1)) - range;
        if (discriminant(a, b) != 0) return EllipticCurve(a, b);
      }
    };
    const auto primes = primes_up_to(1000).primes;
    std::int64_t checked = 0;
    bool hasse = true;
    for (int i = 0; i < 1000; ++i) {
      const auto e = draw(1000000);
      for (auto p : primes) {
        if (p <= 3 || e.disc() % p == 0) continue;
        const int ap = trace_of_frobenius(e, p).a_p;
        if (static_cast<std::int64_t>(ap) * ap > 4 * p) hasse = false;
        ++checked;
      }
    }
    o.require(hasse, "Hasse bound");
    bool exact = true;
    std::int64_t compared = 0;
    for (int i = 0; i < 50; ++i) {
      const auto e = draw(1000);
      for (auto p : primes_up_to(49).primes) {
        if (p <= 3) continue;
        const auto a = mod_small(e.a(), p), b = mod_small(e.b(), p);
        if (trace_of_frobenius(e, p).a_p != oracle::brute_force_trace(a, b, p)) exact = false;
        ++compared;
      }
    }
    o.require(exact, "character sum vs point count");
    o.detail << " " << checked << " Hasse checks, " << compared << " point counts";
  });

  criterion(7, "first moments", [](Outcome& o) {
    const Family a(spec_of({1}, {0, 1}));
    const Family b(spec_of({0, 1}, {1}));
    for (auto p : primes_up_to(99).primes) {
      if (p <= 3) continue;
      o.require(first_moment(a, p) == 0, "A=1,B=T at p=" + std::to_string(p));
      o.require(first_moment(b, p) == -p, "A=T,B=1 at p=" + std::to_string(p));
    }
  });

  criterion(8, "desk-scale global density", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Family f(spec_of({1}, {0, 1}));
    const auto psi = fejer(0.3).as_test_function();
    const auto main = one_level_density(f, 5000, psi, Normalization::Global);
    const double disc = std::fabs(main.value - (0.5 * psi.phi(0.0) + psi.phihat(0.0)));
    const auto at4000 = one_level_density(f, 4000, psi, Normalization::Global);
    const auto at250 = one_level_density(f, 250, psi, Normalization::Global);
    const double d4000 = std::fabs(at4000.value - at4000.prediction);
    const double d250 = std::fabs(at250.value - at250.prediction);
    o.detail << " value=" << fmt(main.value) << " prediction=" << fmt(main.prediction) << " |gap|=" << fmt(disc)
             << " error budget=" << fmt(main.terms.error_budget) << " gap(4000)=" << fmt(d4000)
             << " gap(250)=" << fmt(d250);
    o.require(disc <= 0.5, "|value - prediction| <= 0.5");
    o.require(d4000 <= d250 + 0.1, "gap(4000) <= gap(250) + 0.1");
    o.require(elapsed_since(t0) < 300.0, "runtime < 5 min");
  });

  criterion(9, "random-matrix window counts", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    for (auto [r, tau] : {std::pair{0, 0.5}, std::pair{0, 1.0}, std::pair{1, 0.5}}) {
      EnsembleConfig c;
      c.N = 60;
      c.parity = Parity::Mixed;
      c.forced_rank = r;
      c.samples = 20000;
      c.seed = 9;
      c.tau = tau;
      const auto s = run_ensemble(c);
      const double expect = r + 0.5 + 2.0 * tau;
      o.detail << " (r=" << r << ",tau=" << fmt(tau) << ") mean=" << fmt(s.mean) << "+-" << fmt(s.std_error)
               << " vs " << fmt(expect) << ";";
      o.require(std::fabs(s.mean - expect) <= 0.1, "mean at r=" + std::to_string(r) + " tau=" + fmt(tau));
      o.require(s.min_count >= r, "floor at r=" + std::to_string(r));
    }
    o.require(elapsed_since(t0) < 120.0, "runtime < 2 min");
  });

  criterion(10, "determinism across worker counts", [&](Outcome& o) {
    const fs::path data = fs::path(TEST_DATA_DIR);
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    for (int w : {1, 4}) {
      const fs::path dir = scratch / ("w" + std::to_string(w));
      const std::string base = "\"" + cli + "\" --workers " + std::to_string(w) + " --seed 2024 --format both --out \"" +
                               dir.string() + "\" ";
      const std::string sim = base + "simulate --N 60 --samples 500 --tau 1 --counts";
      const std::string den = base + "density --family \"" + (data / "reference_family.json").string() +
                              "\" --R 1000 --sigma 0.3 >/dev/null 2>&1";
      o.require(std::system((sim + " >/dev/null 2>&1").c_str()) == 0, "simulate run with " + std::to_string(w));
      o.require(std::system(den.c_str()) == 0, "density run with " + std::to_string(w));
    }
    for (const char* f : {"simulate.json", "simulate.csv", "simulate_counts.csv", "density.json", "density.csv"}) {
      const auto a = slurp(scratch / "w1" / f);
      const auto b = slurp(scratch / "w4" / f);
      o.require(!a.empty() && a == b, std::string(f) + " identical");
    }
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
