#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace zwl {

enum class Parity { Even, Odd, Mixed };

std::string_view to_string(Parity p);
Parity parity_from_string(std::string_view name);

struct EnsembleConfig {
  int N = 60;  // size of the g block
  Parity parity = Parity::Mixed;
  int forced_rank = 0;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  double tau = 1.0;
};

/// Throws InvalidArgument unless N >= 4, samples >= 1, tau >= 0, r >= 0 and
/// N matches the parity.
void validate(const EnsembleConfig& config);

/// Haar element of SO(N): QR of a Gaussian matrix, columns sign-fixed by
/// diag(R), first column negated when the determinant is -1.
Eigen::MatrixXd sample_special_orthogonal(int N, Parity parity, std::uint64_t seed);

/// Eigenangles in (-pi, pi], ascending. Rejects non-orthogonal input.
std::vector<double> eigenangles(const Eigen::MatrixXd& m);

/// Angles with |theta| N_total / (2 pi) <= tau.
int window_count(std::span<const double> angles, int n_total, double tau);

/// Window count of diag(I_r, g) for sample `index` of the ensemble.
int sample_window_count(const EnsembleConfig& config, std::int64_t index);

struct WindowCountStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::map<int, std::int64_t> histogram;  // count -> number of samples
  double prediction = 0.0;
  int min_count = 0;
  std::vector<int> counts;  // per sample, in index order
};

/// Scaling-limit expectation of the window count: r + 1/2 + 2 tau for mixed
/// parity, kernel integrals for the split parities.
double predicted_window_count(Parity parity, int forced_rank, double tau);

WindowCountStats run_ensemble(const EnsembleConfig& config, int workers = 1);

std::string to_json(const EnsembleConfig& config);
std::string to_json(const WindowCountStats& stats);

}  // namespace zwl
