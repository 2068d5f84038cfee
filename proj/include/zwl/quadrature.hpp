#pragma once

#include <cstddef>
#include <functional>

namespace zwl {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  std::size_t max_evals = 1'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evals = 0;
};

/// Adaptive Gauss-Legendre quadrature with interval bisection. A panel is
/// accepted when the 20-point rule on the panel and the sum over its two
/// halves agree within the panel's share of abs_tol. Throws NotConverged
/// when max_evals is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Fixed composite Gauss-Legendre rule: `panels` equal panels of 20 nodes.
double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       std::size_t panels);

}  // namespace zwl
