#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zwl/curves.hpp"
#include "zwl/family.hpp"
#include "zwl/testfunc.hpp"

namespace zwl {

enum class Group { U, USp, SO, SOeven, SOodd };

std::string_view to_string(Group g);
Group group_from_string(std::string_view name);

/// W-hat(u) = delta_coefficient * delta(u) + bounded_part(u) with
/// bounded_part(u) = constant_part + indicator_part * I(|u| <= 1).
struct KernelSpec {
  Group group = Group::SO;
  int forced_rank = 0;
  double delta_coefficient = 1.0;
  double constant_part = 0.0;
  double indicator_part = 0.0;

  double bounded_part(double u) const {
    return constant_part + (std::abs(u) <= 1.0 ? indicator_part : 0.0);
  }
};

/// Rejects forced_rank > 0 for U and USp.
KernelSpec kernel_hat(Group group, int forced_rank);

/// delta_coefficient * phihat(0) + int phihat(y) bounded_part(y) dy.
double predicted_density(const EvenTestFunction& fn, const KernelSpec& kernel);

struct DensityTerms {
  double phihat0 = 0.0;
  double phi0 = 0.0;
  double first_sum = 0.0;
  double second_sum = 0.0;
  double error_budget = 0.0;

  double value() const { return phihat0 + phi0 - 2.0 * first_sum - 2.0 * second_sum; }
};

/// Explicit-formula prime side for one curve. Traces must cover every prime
/// 3 < p < N^sigma; a gap is an error.
double curve_ef_sum(std::span<const TraceRecord> traces, const EvenTestFunction& fn, double log_n);
DensityTerms curve_ef_terms(std::span<const TraceRecord> traces, const EvenTestFunction& fn, double log_n);

/// Average of the per-curve terms over the rows of `table`, with log N given
/// per row. Rows are reduced in order, so the result does not depend on
/// `workers`.
DensityTerms average_terms(const TraceTable& table, std::span<const double> log_conductors,
                           const EvenTestFunction& fn, int workers = 1);

enum class Normalization { Local, Global };

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view name);

struct DensityOptions {
  std::optional<double> model_a;  // default r + 1/2
  std::optional<double> model_b;  // default 1
  double kappa = 1.0;
  int workers = 1;
  const TraceCache* cache = nullptr;
};

struct DensityReport {
  Normalization normalization = Normalization::Global;
  std::int64_t R = 0;
  double sigma = 0.0;
  double value = 0.0;
  DensityTerms terms;
  double prediction = 0.0;
  double model_a = 0.0;
  double model_b = 0.0;
};

struct DensityDiagnostics {
  std::size_t family_size = 0;
  std::int64_t singular_skipped = 0;
  double mean_log_conductor = 0.0;
  std::int64_t prime_limit = 0;
  bool used_cache = false;
  std::vector<std::string> warnings;
};

/// Largest sigma allowed before the support warning fires for a family
/// whose D(T) has degree m.
double support_limit(int conductor_degree);

DensityReport one_level_density(const Family& family, std::int64_t R, const EvenTestFunction& fn,
                                Normalization normalization, const DensityOptions& options = {},
                                DensityDiagnostics* diagnostics = nullptr);

struct ConvergenceRow {
  std::int64_t R = 0;
  double value = 0.0;
  double prediction = 0.0;
  double discrepancy = 0.0;
};

/// R_max, R_max/2, ... down to 32 (at most 8 rungs), returned ascending.
std::vector<std::int64_t> dyadic_ladder(std::int64_t r_max);
std::vector<ConvergenceRow> convergence_rows(const Family& family, std::span<const std::int64_t> ladder,
                                             const EvenTestFunction& fn, Normalization normalization,
                                             const DensityOptions& options = {});

/// Sum of a_t(p) over all residues t mod p, p > 3 prime.
std::int64_t first_moment(const Family& family, std::int64_t p);

std::string to_json(const DensityReport& report);
std::string to_json(const DensityDiagnostics& diagnostics);

}  // namespace zwl
