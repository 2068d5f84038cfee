#pragma once

#include <span>
#include <string>
#include <vector>

#include "zwl/testfunc.hpp"

namespace zwl {

/// Maximizer of C(h_n) over h_n(x) = (1-x^2)(1 + a2 x^2 + ... + a2n x^2n).
struct OptimumReport {
  int n = 0;
  std::vector<double> coefficients;  // a2, a4, ..., a2n
  double c_value = 0.0;
  double objective_value = 0.0;      // C^2
  int iterations = 0;
  bool converged = false;
  bool monotone = true;              // h decreasing on [0, 1]
};

struct OptimizeOptions {
  int starts = 25;
  double tolerance = 1e-7;
  int max_iter = 400;
  int workers = 1;
};

/// h_n with a0 = 1 and the given a2, ..., a2n, as exact rationals.
TestFunctionH h_n(std::span<const double> coefficients);

/// -I2/I3 for h_n, evaluated exactly. Throws InvalidArgument when I3 = 0.
double objective(int n, std::span<const double> coefficients);

/// The hand-expanded n = 2 objective, kept as an independent route.
double objective_n2_closed_form(double a2, double a4);

OptimumReport maximize_c(int n, const OptimizeOptions& options = {});

struct CandidateRow {
  std::string name;
  TestFunctionH h;
  double c_value = 0.0;
};

/// The named comparison profiles, sorted by C(h) descending.
std::vector<CandidateRow> scan_candidates();

/// (1-x^2)(1 - 0.233428 x^2 + 0.0189588 x^4), the reference n = 2 optimum.
TestFunctionH reference_optimal_h2();

}  // namespace zwl
