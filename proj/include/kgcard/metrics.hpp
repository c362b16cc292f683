#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgcard/estimators.hpp"
#include "kgcard/observations.hpp"

namespace kgcard {

/// One row of a per-period estimate series.
struct PeriodRecord {
  std::int64_t period = 0;        // contiguous from 0
  std::int64_t distinct = 0;      // D_i: distinct entities so far
  std::int64_t observations = 0;  // n_i: observations so far
  std::int64_t singletons = 0;    // f1_i
  std::vector<Estimate> estimates;  // one per configured method, same order
};

/// Cumulative per-period estimates for one class; the input to the error
/// and convergence metrics.
struct EstimateSeries {
  std::string class_id;
  std::vector<Method> methods;
  std::vector<PeriodRecord> points;

  /// Column view of one method's per-period values (nullopt = undefined).
  std::vector<std::optional<double>> values_of(Method method) const;
  /// Column view of the per-period distinct counts.
  std::vector<std::int64_t> distincts() const;
};

/// Run every configured estimator on the cumulative histogram of each
/// period.
EstimateSeries build_series(const PeriodizedObservations& obs, std::span<const Method> methods);

/// Recency-weighted mean absolute error against a known true size:
///   phi = sum_i |est_i - truth| * i / sum_i i   (periods numbered from 1).
/// Undefined estimates drop both the term and its weight; nullopt when no
/// estimate in the series is defined.
std::optional<double> phi_error(std::span<const std::optional<double>> estimates,
                                double ground_truth);

/// Mean relative gap between estimate and distinct count over the last
/// `window` periods:
///   rho = sum |est_i - D_i| / D_i / window.
/// nullopt when the series is shorter than the window or any window term
/// has an undefined estimate or D_i == 0 (a class too young to assess).
/// `extra_boundary_sample` widens the sum by one period (window + 1 terms,
/// same divisor); kept for comparison only.
std::optional<double> rho_convergence(std::span<const std::optional<double>> estimates,
                                      std::span<const std::int64_t> distincts, std::int64_t window,
                                      bool extra_boundary_sample = false);

struct ClassConvergence {
  std::string class_id;
  std::optional<double> rho;
  std::int64_t distinct = 0;  // D at the last period
};

struct RankedClass {
  std::string class_id;
  double rho = 0.0;
  std::int64_t distinct = 0;
};

struct ConvergenceRanking {
  std::vector<RankedClass> complete_candidates;    // rho < threshold_low, ascending rho
  std::vector<RankedClass> incomplete_candidates;  // rho > threshold_high, descending rho
  std::uint64_t undefined_count = 0;               // classes without a usable rho
};

/// Partition classes by convergence. Ties break on class id so the output
/// is deterministic.
ConvergenceRanking rank_by_convergence(std::span<const ClassConvergence> classes,
                                       double threshold_low, double threshold_high);

}  // namespace kgcard
