// Independent reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls into the code it checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace oracle {

/// p minus the number of affine solutions of y^2 = x^3 + a x + b mod p.
inline int brute_force_trace(std::int64_t a, std::int64_t b, std::int64_t p) {
  a = ((a % p) + p) % p;
  b = ((b % p) + p) % p;
  std::int64_t count = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    std::int64_t rhs = (x * x % p * x + a * x + b) % p;
    for (std::int64_t y = 0; y < p; ++y)
      if (y * y % p == rhs) ++count;
  }
  return static_cast<int>(p - count);
}

/// int_{-inf}^{inf} phi(x) cos(2 pi x y) dx for even phi, truncated at
/// |x| = limit, with phi sampled once on a composite 20-point rule.
class CosineTransform {
 public:
  CosineTransform(const std::function<double(double)>& phi, double limit, double panel_width) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto panels = static_cast<std::size_t>(std::ceil(limit / panel_width));
    const double w = limit / static_cast<double>(panels);
    const auto& abscissa = rule::abscissa();
    const auto& weights = rule::weights();
    for (std::size_t k = 0; k < panels; ++k) {
      const double mid = (static_cast<double>(k) + 0.5) * w;
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        for (int s : {-1, 1}) {
          if (abscissa[i] == 0.0 && s < 0) continue;
          const double x = mid + s * abscissa[i] * 0.5 * w;
          nodes_.push_back(x);
          weights_.push_back(weights[i] * 0.5 * w * phi(x));
        }
      }
    }
  }

  double operator()(double y) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      sum += weights_[i] * std::cos(2.0 * std::numbers::pi * nodes_[i] * y);
    return 2.0 * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Central second difference.
inline double second_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace oracle
