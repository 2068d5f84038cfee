#include "zwl/rmtsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "zwl/density.hpp"
#include "zwl/error.hpp"
#include "zwl/parallel.hpp"
#include "zwl/quadrature.hpp"

namespace zwl {

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Mixed: return "mixed";
  }
  return "?";
}

Parity parity_from_string(std::string_view name) {
  for (Parity p : {Parity::Even, Parity::Odd, Parity::Mixed})
    if (to_string(p) == name) return p;
  fail(ErrorCode::InvalidArgument, "parity must be even, odd or mixed, got '" + std::string(name) + "'");
}

namespace {

void check_dimension(int N, Parity parity) {
  if (N < 4) fail(ErrorCode::InvalidArgument, "ensemble needs N >= 4");
  if (parity == Parity::Even && N % 2 != 0) fail(ErrorCode::InvalidArgument, "parity even needs an even N");
  if (parity == Parity::Odd && N % 2 == 0) fail(ErrorCode::InvalidArgument, "parity odd needs an odd N");
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd haar_so(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

int block_dimension(const EnsembleConfig& config, std::mt19937_64& rng) {
  if (config.parity != Parity::Mixed) return config.N;
  return config.N + static_cast<int>(rng() >> 63);
}

}  // namespace

void validate(const EnsembleConfig& config) {
  check_dimension(config.N, config.parity);
  if (config.samples < 1) fail(ErrorCode::InvalidArgument, "ensemble needs samples >= 1");
  if (config.forced_rank < 0) fail(ErrorCode::InvalidArgument, "forced rank must be >= 0");
  if (!(config.tau >= 0.0)) fail(ErrorCode::InvalidArgument, "tau must be >= 0");
}

Eigen::MatrixXd sample_special_orthogonal(int N, Parity parity, std::uint64_t seed) {
  check_dimension(N, parity);
  auto rng = stream(seed, 0);
  return haar_so(N, rng);
}

std::vector<double> eigenangles(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorCode::InvalidArgument, "eigenangles needs a square matrix");
  const Eigen::MatrixXd gram = m.transpose() * m - Eigen::MatrixXd::Identity(m.rows(), m.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-8) fail(ErrorCode::InvalidArgument, "matrix is not orthogonal");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) fail(ErrorCode::Computation, "eigenvalue solve failed");
  std::vector<double> angles;
  for (const auto& z : solver.eigenvalues()) {
    if (std::abs(std::abs(z) - 1.0) > 1e-8) fail(ErrorCode::Invariant, "eigenvalue off the unit circle");
    double a = std::arg(z);
    if (a <= -std::numbers::pi) a = std::numbers::pi;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

int window_count(std::span<const double> angles, int n_total, double tau) {
  if (!(tau >= 0.0)) fail(ErrorCode::InvalidArgument, "tau must be >= 0");
  const double scale = n_total / (2.0 * std::numbers::pi);
  return static_cast<int>(
      std::count_if(angles.begin(), angles.end(), [&](double a) { return std::abs(a) * scale <= tau; }));
}

int sample_window_count(const EnsembleConfig& config, std::int64_t index) {
  auto rng = stream(config.seed, static_cast<std::uint64_t>(index));
  const int n = block_dimension(config, rng);
  const Eigen::MatrixXd g = haar_so(n, rng);
  // M + M^T has eigenvalues 2 cos(theta), one per eigenangle.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g + g.transpose(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::Computation, "eigenvalue solve failed");
  std::vector<double> abs_angles;
  abs_angles.reserve(static_cast<std::size_t>(n));
  for (double lambda : solver.eigenvalues()) abs_angles.push_back(std::acos(std::clamp(lambda / 2.0, -1.0, 1.0)));
  return config.forced_rank + window_count(abs_angles, config.forced_rank + n, config.tau);
}

double predicted_window_count(Parity parity, int forced_rank, double tau) {
  if (!(tau >= 0.0)) fail(ErrorCode::InvalidArgument, "tau must be >= 0");
  if (parity == Parity::Mixed) return forced_rank + 0.5 + 2.0 * tau;
  // Indicator of [-tau, tau]: phi(0) = 1, phihat(y) = sin(2 pi tau y) / (pi y).
  auto phihat = [tau](double y) {
    const double x = std::numbers::pi * y;
    return std::abs(x) < 1e-12 ? 2.0 * tau : std::sin(2.0 * tau * x) / x;
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  const double indicator_mass = 2.0 * integrate(phihat, 0.0, 1.0, opts).value;
  const KernelSpec k = kernel_hat(parity == Parity::Even ? Group::SOeven : Group::SOodd, forced_rank);
  return k.delta_coefficient * 2.0 * tau + k.constant_part + k.indicator_part * indicator_mass;
}

WindowCountStats run_ensemble(const EnsembleConfig& config, int workers) {
  validate(config);
  const auto n = static_cast<std::size_t>(config.samples);
  WindowCountStats stats;
  stats.counts.assign(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    stats.counts[i] = sample_window_count(config, static_cast<std::int64_t>(i));
  });
  std::vector<double> values(stats.counts.begin(), stats.counts.end());
  stats.mean = pairwise_sum(values) / static_cast<double>(n);
  for (double& v : values) v = (v - stats.mean) * (v - stats.mean);
  const double variance = n > 1 ? pairwise_sum(values) / static_cast<double>(n - 1) : 0.0;
  stats.std_error = std::sqrt(variance / static_cast<double>(n));
  for (int c : stats.counts) ++stats.histogram[c];
  stats.min_count = *std::min_element(stats.counts.begin(), stats.counts.end());
  stats.prediction = predicted_window_count(config.parity, config.forced_rank, config.tau);
  if (stats.min_count < config.forced_rank) fail(ErrorCode::Invariant, "window count below the forced rank");
  return stats;
}

std::string to_json(const EnsembleConfig& c) {
  nlohmann::json j;
  j["N"] = c.N;
  j["parity"] = to_string(c.parity);
  j["r"] = c.forced_rank;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tau"] = c.tau;
  return j.dump();
}

std::string to_json(const WindowCountStats& s) {
  nlohmann::json j;
  j["mean"] = s.mean;
  j["stderr"] = s.std_error;
  j["prediction"] = s.prediction;
  j["min_count"] = s.min_count;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [count, freq] : s.histogram) hist.push_back({{"count", count}, {"frequency", freq}});
  j["histogram"] = hist;
  return j.dump();
}

}  // namespace zwl
