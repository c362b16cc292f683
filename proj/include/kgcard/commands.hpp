#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgcard/report.hpp"

namespace kgcard {

// Process exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInputError = 2;

struct ResolveOptions {
  std::filesystem::path edits_file;
  std::filesystem::path ontology_file;
  std::optional<std::filesystem::path> properties_file;
  std::filesystem::path output_file;
  std::vector<CompositeClassSpec> class_specs;  // empty = all classes
  std::optional<std::string> entity_regex;      // overrides the Q[0-9]+ rule
};

struct EstimateOptions {
  std::vector<std::filesystem::path> mention_files;
  std::filesystem::path output_file;
  double period_days = 30.0;
  std::optional<std::int64_t> origin;  // nullopt: earliest mention, midnight UTC
  std::int64_t window = 4;
  std::vector<Method> methods{default_methods().begin(), default_methods().end()};
  double threshold_low = 0.001;
  double threshold_high = 0.1;
  std::optional<std::filesystem::path> ground_truth_file;  // CSV class,N
  std::int64_t min_observations = 0;
  int threads = 0;  // 0: KGCARD_THREADS env or hardware concurrency
  bool rho_extra_sample = false;
};

struct SimulateOptions {
  std::filesystem::path scenario_file;
  std::filesystem::path output_file;  // mention CSV; metadata beside it as .meta.json
};

struct RankOptions {
  std::vector<std::filesystem::path> report_inputs;  // NDJSON files or directories
  Method method = Method::sor;
  double threshold_low = 0.001;
  double threshold_high = 0.1;
  std::filesystem::path output_prefix;  // <prefix>_complete.csv / <prefix>_incomplete.csv
};

int run_resolve(const ResolveOptions& options, std::ostream& out, std::ostream& err);
int run_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int run_rank(const RankOptions& options, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal rendering, shared by the CSV emitters.
std::string format_double(double value);

}  // namespace kgcard
