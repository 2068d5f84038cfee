#include "zwl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zwl/error.hpp"
#include "zwl/parallel.hpp"

namespace zwl {

namespace {

using Point = std::vector<double>;

struct SimplexResult {
  Point best;
  double value = 0.0;  // objective (to be maximized)
  int iterations = 0;
  bool converged = false;
};

double safe_objective(int n, const Point& x) {
  try {
    return objective(n, x);
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

double diameter(const std::vector<Point>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < simplex[0].size(); ++k) {
      double diff = simplex[i][k] - simplex[0][k];
      s += diff * diff;
    }
    d = std::max(d, std::sqrt(s));
  }
  return d;
}

// Classic reflection / expansion / contraction / shrink search on -objective.
SimplexResult nelder_mead(int n, const Point& start, double step, int max_iter) {
  const auto dim = static_cast<std::size_t>(n);
  std::vector<Point> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
  std::vector<double> cost(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) cost[i] = -safe_objective(n, simplex[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
    std::vector<Point> s2;
    std::vector<double> c2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      c2.push_back(cost[i]);
    }
    simplex = std::move(s2);
    cost = std::move(c2);
  };

  SimplexResult out;
  order();
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (diameter(simplex) < 1e-9) {
      out.converged = true;
      break;
    }
    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
    auto along = [&](double t) {
      Point p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = centroid[k] + t * (simplex[dim][k] - centroid[k]);
      return p;
    };
    Point reflected = along(-1.0);
    double fr = -safe_objective(n, reflected);
    if (fr < cost[0]) {
      Point expanded = along(-2.0);
      double fe = -safe_objective(n, expanded);
      if (fe < fr) {
        simplex[dim] = expanded;
        cost[dim] = fe;
      } else {
        simplex[dim] = reflected;
        cost[dim] = fr;
      }
    } else if (fr < cost[dim - 1]) {
      simplex[dim] = reflected;
      cost[dim] = fr;
    } else {
      const bool outside = fr < cost[dim];
      Point contracted = along(outside ? -0.5 : 0.5);
      double fc = -safe_objective(n, contracted);
      if (fc < (outside ? fr : cost[dim])) {
        simplex[dim] = contracted;
        cost[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t k = 0; k < dim; ++k)
            simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          cost[i] = -safe_objective(n, simplex[i]);
        }
      }
    }
    order();
  }
  if (!out.converged && diameter(simplex) < 1e-9) out.converged = true;
  out.best = simplex[0];
  out.value = -cost[0];
  out.iterations = iter;
  return out;
}

bool better(const SimplexResult& a, const SimplexResult& b) {
  if (a.value != b.value) return a.value > b.value;
  return std::lexicographical_compare(a.best.begin(), a.best.end(), b.best.begin(), b.best.end());
}

}  // namespace

TestFunctionH h_n(std::span<const double> coefficients) {
  std::vector<Rational> q{Rational(1)};
  for (double c : coefficients) q.push_back(rational_from_double(c));
  return TestFunctionH::even_polynomial(std::move(q));
}

double objective(int n, std::span<const double> coefficients) {
  if (n < 0 || static_cast<std::size_t>(n) != coefficients.size())
    fail(ErrorCode::InvalidArgument, "objective: expected " + std::to_string(n) + " coefficients");
  HIntegrals in = h_integrals(h_n(coefficients));
  if (in.i3_exact == 0) fail(ErrorCode::InvalidArgument, "objective: degenerate candidate (I3 = 0)");
  return static_cast<double>(Rational(-in.i2_exact / in.i3_exact));
}

double objective_n2_closed_form(double a2, double a4) {
  const double num = 6006.0 + 286.0 * a2 * a2 + 572.0 * a4 + 70.0 * a4 * a4 + 52.0 * a2 * (33.0 + 5.0 * a4);
  const double den = 39.0 * (385.0 + 121.0 * a2 * a2 + 66.0 * a4 + 65.0 * a4 * a4 + 154.0 * a2 * (1.0 + a4));
  return num / den;
}

OptimumReport maximize_c(int n, const OptimizeOptions& options) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "maximize_c: n must be >= 0");
  OptimumReport report;
  report.n = n;
  if (n == 0) {
    report.objective_value = objective(0, {});
    report.c_value = std::sqrt(report.objective_value);
    report.converged = true;
    report.monotone = is_monotone_decreasing(h_n({}));
    return report;
  }

  const int per_axis = std::max(1, static_cast<int>(std::lround(std::pow(options.starts, 1.0 / n))));
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> starts(total, Point(static_cast<std::size_t>(n)));
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t code = s;
    for (int k = 0; k < n; ++k) {
      auto i = static_cast<int>(code % static_cast<std::size_t>(per_axis));
      code /= static_cast<std::size_t>(per_axis);
      starts[s][static_cast<std::size_t>(k)] = -1.0 + (2.0 * i + 1.0) / per_axis;
    }
  }
  const double step = 1.0 / per_axis;
  std::vector<SimplexResult> results(total);
  parallel_for(total, options.workers, [&](std::size_t s) {
    results[s] = nelder_mead(n, starts[s], step, options.max_iter);
  });
  SimplexResult winner = results[0];
  for (std::size_t s = 1; s < total; ++s)
    if (better(results[s], winner)) winner = results[s];

  // Restart from the winner until consecutive optima agree.
  int iterations = winner.iterations;
  bool settled = false;
  for (int round = 0; round < 10 && !settled; ++round) {
    SimplexResult again = nelder_mead(n, winner.best, 1e-2, options.max_iter);
    iterations += again.iterations;
    double shift = 0.0;
    for (std::size_t k = 0; k < again.best.size(); ++k)
      shift = std::max(shift, std::fabs(again.best[k] - winner.best[k]));
    settled = shift < options.tolerance && again.converged;
    if (better(again, winner) || settled) winner = again;
  }

  report.coefficients = winner.best;
  report.objective_value = objective(n, winner.best);
  report.c_value = std::sqrt(report.objective_value);
  report.iterations = iterations;
  report.converged = settled;
  report.monotone = is_monotone_decreasing(h_n(winner.best));
  return report;
}

TestFunctionH reference_optimal_h2() {
  return TestFunctionH::even_polynomial(
      {Rational(1), parse_rational("-0.233428"), parse_rational("0.0189588")});
}

std::vector<CandidateRow> scan_candidates() {
  std::vector<CandidateRow> rows;
  auto add = [&](std::string name, TestFunctionH h) {
    double c = c_of_h(h);
    rows.push_back({std::move(name), std::move(h), c});
  };
  add("optimal h2", reference_optimal_h2());
  add("1-x^2", TestFunctionH::even_polynomial({Rational(1)}));
  add("(1-x^2)^2", TestFunctionH::even_polynomial({Rational(1), Rational(-1)}));
  add("exp(-1/(1-x^2))", TestFunctionH::bump(Rational(1)));
  add("exp(-0.754212/(1-x^2))", TestFunctionH::bump(parse_rational("0.754212")));
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CandidateRow& a, const CandidateRow& b) { return a.c_value > b.c_value; });
  return rows;
}

}  // namespace zwl
