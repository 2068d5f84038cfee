#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace zwl {

using Rational = boost::multiprecision::cpp_rational;

/// Dense polynomial with exact rational coefficients, lowest degree first.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coeffs);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  RationalPoly derivative() const;
  /// Exact integral over [0, 1].
  Rational integral01() const;
  Rational eval(const Rational& x) const;
  double eval(double x) const;

  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);

 private:
  void trim();
  std::vector<Rational> coeffs_;
  std::vector<double> approx_;
};

/// Parses "-0.233428", "3/7", "12" or "1e-3" exactly.
Rational parse_rational(const std::string& text);
/// Exact value of a finite double.
Rational rational_from_double(double x);

/// The profile h: even, supported on [-1, 1].
class TestFunctionH {
 public:
  enum class Kind { EvenPolynomial, Bump };

  /// h(x) = (1 - x^2) q(x^2) with q(s) = q[0] + q[1] s + q[2] s^2 + ...
  static TestFunctionH even_polynomial(std::vector<Rational> q);
  /// h(x) = exp(-a / (1 - x^2)), a > 0.
  static TestFunctionH bump(Rational a);

  Kind kind() const { return kind_; }
  const std::vector<Rational>& q_coeffs() const { return q_; }
  /// Full polynomial in x (EvenPolynomial only).
  const RationalPoly& poly() const { return poly_; }
  const Rational& bump_parameter() const { return bump_a_; }
  std::string describe() const;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  Kind kind_ = Kind::EvenPolynomial;
  std::vector<Rational> q_;
  RationalPoly poly_;
  RationalPoly poly_d1_;
  RationalPoly poly_d2_;
  Rational bump_a_ = 0;
  double bump_a_double_ = 0.0;
};

/// I1 = int_0^1 h, I2 = int_0^1 h^2, I3 = int_0^1 h h''.
struct HIntegrals {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  bool exact = false;
  Rational i1_exact = 0;
  Rational i2_exact = 0;
  Rational i3_exact = 0;
};

HIntegrals h_integrals(const TestFunctionH& h);

/// C(h) = sqrt(-I2 / I3). Throws InvalidArgument when I3 >= 0.
double c_of_h(const TestFunctionH& h);

/// phihat(0)/phi(0) = (I2 + (1/(sigma tau pi))^2 I3) / (sigma I1^2).
double ratio_phihat0_phi0(const TestFunctionH& h, double sigma, double tau);

/// h decreasing on [0, 1], checked on a uniform grid.
bool is_monotone_decreasing(const TestFunctionH& h, int grid_points = 1000);

/// An even test function with phihat supported in (-sigma, sigma), in the
/// shape the density and bounds engines consume.
struct EvenTestFunction {
  std::string name;
  double sigma = 0.0;
  std::function<double(double)> phi;
  std::function<double(double)> phihat;
};

/// phi(x) = fhat(x)^2 (1 - (x/tau)^2), phihat = g + (2 pi tau)^-2 g'' with
/// f(y) = h(2y/sigma) and g = f * f.
class TestFunctionPhi {
 public:
  TestFunctionPhi(TestFunctionH h, double sigma, double tau);

  const TestFunctionH& source_h() const { return h_; }
  double sigma() const { return sigma_; }
  double tau() const { return tau_; }

  double f(double y) const;
  double f_d1(double y) const;
  double f_d2(double y) const;
  /// sigma * int_0^1 h(u) cos(pi sigma x u) du.
  double fhat(double x) const;
  double g(double y) const;
  /// Second derivative of g as f * f'' including the contribution of the
  /// jump of f' at the support ends (zero when h'(1) = 0).
  double g_d2(double y) const;

  double phi_at(double x) const;
  double phihat_at(double y) const;

  EvenTestFunction as_test_function() const;

 private:
  double convolve(const std::function<double(double)>& left,
                  const std::function<double(double)>& right, double y) const;

  TestFunctionH h_;
  double sigma_;
  double tau_;
  std::vector<double> edge_derivs_;
  double edge_jump_;  // -f'(sigma/2 from the left)
};

TestFunctionPhi build_phi(const TestFunctionH& h, double sigma, double tau);

/// psi(x) = (sin(pi sigma x) / (pi sigma x))^2 with triangular transform.
class FejerPsi {
 public:
  explicit FejerPsi(double sigma);

  double sigma() const { return sigma_; }
  double psi_at(double x) const;
  double psihat_at(double y) const;
  double psiprime_at(double x) const;

  EvenTestFunction as_test_function() const;

 private:
  double sigma_;
};

FejerPsi fejer(double sigma);

}  // namespace zwl
