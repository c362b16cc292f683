#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kgcard/metrics.hpp"
#include "kgcard/ontology.hpp"

namespace kgcard {

enum class CompletenessFlag { complete, incomplete, indeterminate };

std::string_view completeness_name(CompletenessFlag flag);

/// Knobs echoed into every report so a result is reproducible from the
/// report alone.
struct ReportConfig {
  std::int64_t period_length = 30 * kSecondsPerDay;
  std::int64_t origin = 0;
  std::int64_t window = 4;
  std::vector<Method> methods{default_methods().begin(), default_methods().end()};
  double threshold_low = 0.001;
  double threshold_high = 0.1;
  std::int64_t min_observations = 0;
  bool rho_extra_sample = false;  // widen the convergence window by one period
};

/// Final per-class artifact: the estimate series, per-method convergence
/// and completeness, optional error-vs-truth, and the skip accounting.
struct ClassReport {
  std::string class_id;
  std::vector<std::pair<std::string, std::string>> filters;  // decoded composite constraints
  ReportConfig config;
  EstimateSeries series;
  std::map<Method, std::optional<double>> rho;
  std::map<Method, CompletenessFlag> flags;
  std::optional<double> ground_truth;
  std::map<Method, std::optional<double>> phi;  // empty without ground truth
  std::optional<double> phi_distinct;           // error of the D_i lower bound
  std::uint64_t skipped_pre_origin = 0;

  std::int64_t final_distinct() const {
    return series.points.empty() ? 0 : series.points.back().distinct;
  }
};

ClassReport build_class_report(const PeriodizedObservations& obs, const ReportConfig& config,
                               std::optional<double> ground_truth = std::nullopt);

nlohmann::json report_to_json(const ClassReport& report);

/// The slice of a report line the rank command needs.
struct ReportDigest {
  std::string class_id;
  std::map<std::string, std::optional<double>> rho;
  std::int64_t distinct = 0;
};

/// Parse one NDJSON report line; nullopt when the line is not a report.
std::optional<ReportDigest> parse_report_digest(std::string_view line);

/// Decompose a composite class token ("Q515&P17=Q142") back into base and
/// filters; plain tokens yield an empty filter list.
CompositeClassSpec parse_class_token(std::string_view token);

}  // namespace kgcard
