#pragma once

#include <optional>
#include <string>

#include "zwl/testfunc.hpp"

namespace zwl {

/// Window-count bounds for the average number of normalized zeros in
/// [-tau, tau], stated as R -> infinity limits.
struct BoundsReport {
  int r = 0;
  double sigma = 0.0;
  double tau = 0.0;        // where upper and rmt are evaluated
  double tau_lower = 0.0;  // where lower is evaluated
  double model_a = 0.0;
  double model_b = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double rmt = 0.0;
  double tau_bsd = 0.0;
  double c_h = 0.0;
  bool sandwich_ok = false;
};

/// a + b * phihat(0)/phi(0) for the phi built from h.
double lower_bound(double model_a, double model_b, const TestFunctionH& h, double sigma, double tau);

/// 1 / (pi C(h) sigma): the smallest window certified to hold a zeros.
double tau_bsd(const TestFunctionH& h, double sigma);

/// a + (a (psi(0) - psi(tau)) + b psihat(0)) / psi(tau); requires 0 < tau < 1/sigma.
double upper_bound(double model_a, double model_b, const FejerPsi& psi, double tau);

/// r + 1/2 + 2 tau.
double rmt_window(int r, double tau);

struct SandwichOptions {
  std::optional<double> model_a;       // default r + 1/2
  std::optional<double> model_b;       // default 1
  std::optional<double> tau_lower;     // default tau_bsd(h, sigma)
  std::optional<double> tau;           // default 1 / (2 sigma)
};

BoundsReport sandwich(int r, double sigma, const TestFunctionH& h, const FejerPsi& psi,
                      const SandwichOptions& options = {});

/// Aligned text table in the layout lower <= rmt <= upper.
std::string format_bounds_table(const BoundsReport& report);

}  // namespace zwl
