#include "zwl/testfunc.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "zwl/error.hpp"
#include "zwl/quadrature.hpp"

namespace zwl {

namespace {

constexpr double kPi = std::numbers::pi;

double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace

// ---------------------------------------------------------------- RationalPoly

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  approx_.clear();
  for (const auto& c : coeffs_) approx_.push_back(to_double(c));
}

RationalPoly RationalPoly::derivative() const {
  std::vector<Rational> out;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<int>(i));
  return RationalPoly(std::move(out));
}

Rational RationalPoly::integral01() const {
  Rational sum = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) sum += coeffs_[i] / Rational(static_cast<int>(i + 1));
  return sum;
}

Rational RationalPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPoly::eval(double x) const {
  double acc = 0.0;
  for (auto it = approx_.rbegin(); it != approx_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return RationalPoly(std::move(out));
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
  std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
  return RationalPoly(std::move(out));
}

// ------------------------------------------------------------------- parsing

Rational parse_rational(const std::string& text) {
  auto bad = [&] { fail(ErrorCode::InvalidArgument, "not an exact number: '" + text + "'"); };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) bad();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    try {
      boost::multiprecision::cpp_int num(s.substr(0, slash));
      boost::multiprecision::cpp_int den(s.substr(slash + 1));
      if (den == 0) bad();
      return Rational(num, den);
    } catch (const std::runtime_error&) {
      bad();
    }
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool seen_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      seen_digit = true;
      if (after_point) --scale;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) bad();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') bad();
    try {
      std::size_t used = 0;
      int exponent = std::stoi(s.substr(pos + 1), &used);
      if (used != s.size() - pos - 1) bad();
      scale += exponent;
    } catch (const std::logic_error&) {
      bad();
    }
  }
  Rational value(digits);
  boost::multiprecision::cpp_int ten_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::abs(scale)));
  value = scale >= 0 ? value * Rational(ten_pow) : value / Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite coefficient");
  if (x == 0.0) return 0;
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an exact integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational out(scaled);
  boost::multiprecision::cpp_int two_pow = boost::multiprecision::cpp_int(1) << std::abs(exponent);
  return exponent >= 0 ? out * Rational(two_pow) : out / Rational(two_pow);
}

// -------------------------------------------------------------- TestFunctionH

TestFunctionH TestFunctionH::even_polynomial(std::vector<Rational> q) {
  TestFunctionH h;
  h.kind_ = Kind::EvenPolynomial;
  std::vector<Rational> in_x;
  for (std::size_t k = 0; k < q.size(); ++k) {
    in_x.resize(2 * k + 1, Rational(0));
    in_x[2 * k] = q[k];
  }
  h.q_ = std::move(q);
  h.poly_ = RationalPoly({1, 0, -1}) * RationalPoly(std::move(in_x));
  h.poly_d1_ = h.poly_.derivative();
  h.poly_d2_ = h.poly_d1_.derivative();
  return h;
}

TestFunctionH TestFunctionH::bump(Rational a) {
  if (a <= 0) fail(ErrorCode::InvalidArgument, "bump parameter must be positive");
  TestFunctionH h;
  h.kind_ = Kind::Bump;
  h.bump_a_ = a;
  h.bump_a_double_ = to_double(a);
  return h;
}

std::string TestFunctionH::describe() const {
  std::ostringstream out;
  if (kind_ == Kind::Bump) {
    out << "exp(-" << to_double(bump_a_) << "/(1-x^2))";
    return out.str();
  }
  if (q_.size() == 1 && q_[0] == 1) return "1-x^2";
  out << "(1-x^2)(";
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const double c = to_double(q_[k]);
    if (k > 0) out << (c < 0 ? " - " : " + ");
    const double mag = k > 0 ? std::fabs(c) : c;
    if (k == 0 || mag != 1.0) out << mag;
    if (k == 1) out << "x^2";
    if (k > 1) out << "x^" << 2 * k;
  }
  out << ")";
  return out.str();
}

double TestFunctionH::value(double x) const {
  if (std::fabs(x) >= 1.0) return 0.0;
  if (kind_ == Kind::EvenPolynomial) return poly_.eval(x);
  return std::exp(-bump_a_double_ / (1.0 - x * x));
}

double TestFunctionH::d1(double x) const {
  if (std::fabs(x) >= 1.0) return 0.0;
  if (kind_ == Kind::EvenPolynomial) return poly_d1_.eval(x);
  const double s = 1.0 - x * x;
  const double h = value(x);
  if (h == 0.0) return 0.0;
  const double a = bump_a_double_;
  return h * (-2.0 * a * x / (s * s));
}

double TestFunctionH::d2(double x) const {
  if (std::fabs(x) >= 1.0) return 0.0;
  if (kind_ == Kind::EvenPolynomial) return poly_d2_.eval(x);
  const double s = 1.0 - x * x;
  const double h = value(x);
  if (h == 0.0) return 0.0;
  const double a = bump_a_double_;
  const double s2 = s * s;
  return h * (4.0 * a * a * x * x / (s2 * s2) - 2.0 * a / s2 - 8.0 * a * x * x / (s2 * s));
}

HIntegrals h_integrals(const TestFunctionH& h) {
  HIntegrals out;
  if (h.kind() == TestFunctionH::Kind::EvenPolynomial) {
    const RationalPoly& p = h.poly();
    out.exact = true;
    out.i1_exact = p.integral01();
    out.i2_exact = (p * p).integral01();
    out.i3_exact = (p * p.derivative().derivative()).integral01();
    out.i1 = to_double(out.i1_exact);
    out.i2 = to_double(out.i2_exact);
    out.i3 = to_double(out.i3_exact);
    return out;
  }
  QuadratureOptions opts;
  opts.abs_tol = 1e-12;
  out.i1 = integrate([&](double u) { return h.value(u); }, 0.0, 1.0, opts).value;
  out.i2 = integrate([&](double u) { double v = h.value(u); return v * v; }, 0.0, 1.0, opts).value;
  out.i3 = integrate([&](double u) { return h.value(u) * h.d2(u); }, 0.0, 1.0, opts).value;
  return out;
}

double c_of_h(const TestFunctionH& h) {
  HIntegrals in = h_integrals(h);
  const bool degenerate = in.exact ? in.i3_exact >= 0 : in.i3 >= 0.0;
  if (degenerate)
    fail(ErrorCode::InvalidArgument, "C(h) undefined: int h h'' >= 0 for " + h.describe());
  if (in.exact) return std::sqrt(to_double(Rational(-in.i2_exact / in.i3_exact)));
  return std::sqrt(-in.i2 / in.i3);
}

double ratio_phihat0_phi0(const TestFunctionH& h, double sigma, double tau) {
  if (!(sigma > 0.0) || !(tau > 0.0))
    fail(ErrorCode::InvalidArgument, "ratio requires sigma > 0 and tau > 0");
  HIntegrals in = h_integrals(h);
  if (in.exact ? in.i1_exact == 0 : in.i1 == 0.0)
    fail(ErrorCode::InvalidArgument, "ratio undefined: int_0^1 h = 0");
  const double w = 1.0 / (sigma * tau * kPi);
  return (in.i2 + w * w * in.i3) / (sigma * in.i1 * in.i1);
}

bool is_monotone_decreasing(const TestFunctionH& h, int grid_points) {
  double prev = h.value(0.0);
  for (int i = 1; i <= grid_points; ++i) {
    double v = h.value(static_cast<double>(i) / grid_points);
    if (v > prev + 1e-15) return false;
    prev = v;
  }
  return true;
}

// ------------------------------------------------------------ TestFunctionPhi

TestFunctionPhi::TestFunctionPhi(TestFunctionH h, double sigma, double tau)
    : h_(std::move(h)), sigma_(sigma), tau_(tau) {
  if (!(sigma > 0.0) || !(tau > 0.0))
    fail(ErrorCode::InvalidArgument, "build_phi requires sigma > 0 and tau > 0");
  edge_jump_ = -(2.0 / sigma_) * h_.d1(std::nextafter(1.0, 0.0));
  if (h_.kind() == TestFunctionH::Kind::EvenPolynomial)
    edge_jump_ = -(2.0 / sigma_) * to_double(h_.poly().derivative().eval(Rational(1)));
  if (h_.kind() == TestFunctionH::Kind::EvenPolynomial) {
    for (RationalPoly d = h_.poly(); !d.is_zero(); d = d.derivative())
      edge_derivs_.push_back(to_double(d.eval(Rational(1))));
  }
}

double TestFunctionPhi::f(double y) const { return h_.value(2.0 * y / sigma_); }
double TestFunctionPhi::f_d1(double y) const { return (2.0 / sigma_) * h_.d1(2.0 * y / sigma_); }
double TestFunctionPhi::f_d2(double y) const {
  return (4.0 / (sigma_ * sigma_)) * h_.d2(2.0 * y / sigma_);
}

double TestFunctionPhi::fhat(double x) const {
  const double omega = kPi * sigma_ * std::fabs(x);
  if (h_.kind() == TestFunctionH::Kind::Bump) {
    QuadratureOptions opts;
    opts.abs_tol = 1e-15;
    return sigma_ * integrate([&](double u) { return h_.value(u) * std::cos(omega * u); }, 0.0, 1.0, opts).value;
  }
  const RationalPoly& p = h_.poly();
  const int degree = p.degree();
  if (degree < 0) return 0.0;
  if (omega <= 4.0 * (degree + 2)) {
    auto panels = static_cast<std::size_t>(2 + omega / 4.0);
    return sigma_ * integrate_fixed([&](double u) { return p.eval(u) * std::cos(omega * u); }, 0.0, 1.0, panels);
  }
  // Repeated integration by parts; the lower limit vanishes for even h.
  const double s = std::sin(omega);
  const double c = std::cos(omega);
  double sum = 0.0;
  double power = omega;  // omega^(j+1)
  for (int j = 0; j < static_cast<int>(edge_derivs_.size()); ++j) {
    const double dj = edge_derivs_[j];
    const double sign = ((j / 2) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * dj * (j % 2 == 0 ? s : c) / power;
    power *= omega;
  }
  return sigma_ * sum;
}

double TestFunctionPhi::convolve(const std::function<double(double)>& left,
                                 const std::function<double(double)>& right, double y) const {
  y = std::fabs(y);
  if (y >= sigma_) return 0.0;
  const double lo = y - 0.5 * sigma_;
  const double hi = 0.5 * sigma_;
  auto integrand = [&](double t) { return left(t) * right(y - t); };
  if (h_.kind() == TestFunctionH::Kind::EvenPolynomial) {
    // Polynomial on the overlap: the fixed rule is exact up to degree 79.
    return integrate_fixed(integrand, lo, hi, 2);
  }
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  return integrate(integrand, lo, hi, opts).value;
}

double TestFunctionPhi::g(double y) const {
  return convolve([&](double t) { return f(t); }, [&](double t) { return f(t); }, y);
}

double TestFunctionPhi::g_d2(double y) const {
  y = std::fabs(y);
  if (y >= sigma_) return 0.0;
  double out = convolve([&](double t) { return f(t); }, [&](double t) { return f_d2(t); }, y);
  out += edge_jump_ * (f(y - 0.5 * sigma_) + f(y + 0.5 * sigma_));
  return out;
}

double TestFunctionPhi::phi_at(double x) const {
  const double fx = fhat(x);
  const double r = x / tau_;
  return fx * fx * (1.0 - r * r);
}

double TestFunctionPhi::phihat_at(double y) const {
  if (std::fabs(y) >= sigma_) return 0.0;
  const double k = 2.0 * kPi * tau_;
  return g(y) + g_d2(y) / (k * k);
}

EvenTestFunction TestFunctionPhi::as_test_function() const {
  auto self = std::make_shared<TestFunctionPhi>(*this);
  return {"phi[" + h_.describe() + "]", sigma_,
          [self](double x) { return self->phi_at(x); },
          [self](double y) { return self->phihat_at(y); }};
}

TestFunctionPhi build_phi(const TestFunctionH& h, double sigma, double tau) {
  return TestFunctionPhi(h, sigma, tau);
}

// ------------------------------------------------------------------- FejerPsi

FejerPsi::FejerPsi(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "Fejer psi requires sigma > 0");
}

double FejerPsi::psi_at(double x) const {
  const double u = kPi * sigma_ * x;
  if (std::fabs(u) < 1e-4) return 1.0 - u * u / 3.0;
  const double r = std::sin(u) / u;
  return r * r;
}

double FejerPsi::psihat_at(double y) const {
  const double a = std::fabs(y);
  if (a >= sigma_) return 0.0;
  return (1.0 / sigma_) * (1.0 - a / sigma_);
}

double FejerPsi::psiprime_at(double x) const {
  const double u = kPi * sigma_ * x;
  if (std::fabs(u) < 1e-4) return -2.0 / 3.0 * kPi * sigma_ * u;
  const double s = std::sin(u);
  return 2.0 * s / (sigma_ * kPi * x * x) * (std::cos(u) - s / u);
}

EvenTestFunction FejerPsi::as_test_function() const {
  FejerPsi copy = *this;
  return {"fejer", sigma_, [copy](double x) { return copy.psi_at(x); },
          [copy](double y) { return copy.psihat_at(y); }};
}

FejerPsi fejer(double sigma) { return FejerPsi(sigma); }

}  // namespace zwl
