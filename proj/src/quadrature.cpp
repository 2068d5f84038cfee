#include "zwl/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "zwl/error.hpp"

namespace zwl {

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

double gauss20(const std::function<double(double)>& f, double a, double b) {
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  // 20 is even: no node at the centre.
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return sum * half;
}

struct Panel {
  double a;
  double b;
  double whole;
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  QuadratureResult result;
  if (a == b) return result;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double length = b - a;
  std::vector<Panel> stack;
  stack.push_back({a, b, gauss20(f, a, b)});
  result.evals = 20;
  double total = 0.0;
  double error = 0.0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = gauss20(f, p.a, m);
    const double right = gauss20(f, m, p.b);
    result.evals += 40;
    const double diff = std::fabs(left + right - p.whole);
    const double share = options.abs_tol * (p.b - p.a) / length;
    // Panels narrower than a few ulps cannot be refined further.
    const bool tiny = (p.b - p.a) <= 64 * std::numeric_limits<double>::epsilon() * std::fabs(m);
    if (diff <= share || tiny) {
      total += left + right;
      error += diff;
      continue;
    }
    if (result.evals >= options.max_evals)
      fail(ErrorCode::NotConverged,
           "adaptive quadrature did not reach tolerance within " +
               std::to_string(options.max_evals) + " evaluations");
    stack.push_back({m, p.b, right});
    stack.push_back({p.a, m, left});
  }
  result.value = sign * total;
  result.error_estimate = error;
  return result;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       std::size_t panels) {
  if (panels == 0) panels = 1;
  const double step = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    double lo = a + step * static_cast<double>(i);
    double hi = (i + 1 == panels) ? b : lo + step;
    sum += gauss20(f, lo, hi);
  }
  return sum;
}

}  // namespace zwl
