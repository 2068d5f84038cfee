#include "zwl/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "zwl/error.hpp"

namespace zwl {

double lower_bound(double model_a, double model_b, const TestFunctionH& h, double sigma, double tau) {
  return model_a + model_b * ratio_phihat0_phi0(h, sigma, tau);
}

double tau_bsd(const TestFunctionH& h, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "tau_bsd requires sigma > 0");
  return 1.0 / (std::numbers::pi * c_of_h(h) * sigma);
}

double upper_bound(double model_a, double model_b, const FejerPsi& psi, double tau) {
  if (!(tau > 0.0) || tau >= 1.0 / psi.sigma())
    fail(ErrorCode::InvalidArgument, "upper_bound requires 0 < tau < 1/sigma (psi vanishes at 1/sigma)");
  const double psi0 = psi.psi_at(0.0);
  const double psit = psi.psi_at(tau);
  return model_a + (model_a * (psi0 - psit) + model_b * psi.psihat_at(0.0)) / psit;
}

double rmt_window(int r, double tau) {
  if (tau < 0.0) fail(ErrorCode::InvalidArgument, "rmt_window requires tau >= 0");
  return r + 0.5 + 2.0 * tau;
}

BoundsReport sandwich(int r, double sigma, const TestFunctionH& h, const FejerPsi& psi,
                      const SandwichOptions& options) {
  if (r < 0) fail(ErrorCode::InvalidArgument, "sandwich requires r >= 0");
  BoundsReport out;
  out.r = r;
  out.sigma = sigma;
  out.model_a = options.model_a.value_or(r + 0.5);
  out.model_b = options.model_b.value_or(1.0);
  out.c_h = c_of_h(h);
  out.tau_bsd = tau_bsd(h, sigma);
  out.tau_lower = options.tau_lower.value_or(out.tau_bsd);
  out.tau = options.tau.value_or(1.0 / (2.0 * sigma));
  out.lower = lower_bound(out.model_a, out.model_b, h, sigma, out.tau_lower);
  out.rmt = rmt_window(r, out.tau);
  out.upper = upper_bound(out.model_a, out.model_b, psi, out.tau);
  out.sandwich_ok = out.lower <= out.rmt && out.rmt <= out.upper;
  return out;
}

std::string format_bounds_table(const BoundsReport& b) {
  char line[256];
  std::ostringstream out;
  std::snprintf(line, sizeof line, "r = %d   sigma = %.12g   C(h) = %.12g   tau_BSD = %.12g\n", b.r,
                b.sigma, b.c_h, b.tau_bsd);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %-18s %-18s\n", "", "tau", "window count");
  out << line;
  std::snprintf(line, sizeof line, "%-8s %-18.12g %-18.12g\n", "lower", b.tau_lower, b.lower);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %-18.12g %-18.12g\n", "rmt", b.tau, b.rmt);
  out << line;
  std::snprintf(line, sizeof line, "%-8s %-18.12g %-18.12g\n", "upper", b.tau, b.upper);
  out << line;
  std::snprintf(line, sizeof line, "%.12g <= %.12g <= %.12g : %s\n", b.lower, b.rmt, b.upper,
                b.sandwich_ok ? "holds" : "FAILS");
  out << line;
  return out.str();
}

}  // namespace zwl
