// kgcard: class-cardinality and completeness estimation for collaborative
// knowledge graphs, from edit-history capture-recapture statistics.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgcard/commands.hpp"

namespace {

std::vector<kgcard::Method> parse_method_list(const std::string& csv) {
  std::vector<kgcard::Method> methods;
  for (std::string_view part : kgcard::split_fields(csv, ',')) {
    part = kgcard::trim(part);
    if (part.empty()) continue;
    auto method = kgcard::parse_method(part);
    if (!method) {
      throw CLI::ValidationError("--methods", "unknown method '" + std::string(part) +
                                                  "' (known: jack1, jack2, n1unif, sor, chao92)");
    }
    if (std::find(methods.begin(), methods.end(), *method) == methods.end()) {
      methods.push_back(*method);
    }
  }
  if (methods.empty()) throw CLI::ValidationError("--methods", "no methods given");
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class cardinality and completeness estimation from knowledge-graph edit history"};
  app.require_subcommand(1);

  // --- resolve ---------------------------------------------------------
  kgcard::ResolveOptions resolve_options;
  std::string entity_regex;
  auto* resolve = app.add_subcommand(
      "resolve", "Join an edit history against an ontology snapshot and emit mentions");
  resolve->add_option("--edits", resolve_options.edits_file,
                      "Edit history TSV: subject<TAB>property<TAB>object<TAB>timestamp<TAB>user")
      ->required();
  resolve->add_option("--ontology", resolve_options.ontology_file,
                      "Ontology TSV: entity<TAB>instanceOf|subclassOf<TAB>target")
      ->required();
  resolve->add_option("--out", resolve_options.output_file, "Output mention CSV")->required();
  std::filesystem::path properties_path;
  auto* properties_opt = resolve->add_option(
      "--properties", properties_path, "Property TSV backing --where: entity<TAB>property<TAB>target");
  // --class starts a spec; each --where attaches to the most recent --class.
  resolve->add_option_function<std::string>(
             "--class",
             [&resolve_options](const std::string& value) {
               resolve_options.class_specs.push_back({value, {}});
             },
             "Restrict output to this class (repeatable)")
      ->trigger_on_parse();
  resolve->add_option_function<std::string>(
             "--where",
             [&resolve_options](const std::string& value) {
               auto eq = value.find('=');
               if (eq == std::string::npos || eq == 0 || eq + 1 == value.size()) {
                 throw CLI::ValidationError("--where", "expected PROPERTY=TARGET");
               }
               if (resolve_options.class_specs.empty()) {
                 throw CLI::ValidationError("--where", "must follow a --class");
               }
               resolve_options.class_specs.back().filters.emplace_back(value.substr(0, eq),
                                                                       value.substr(eq + 1));
             },
             "Property constraint for the preceding --class, e.g. P17=Q142 (repeatable)")
      ->trigger_on_parse();
  auto* entity_regex_opt = resolve->add_option(
      "--entity-regex", entity_regex,
      "Regex deciding which object tokens are entities (default: Q[0-9]+)");

  // --- estimate --------------------------------------------------------
  kgcard::EstimateOptions estimate_options;
  std::string methods_csv;
  auto* estimate = app.add_subcommand(
      "estimate", "Compute per-class estimate series, convergence and completeness reports");
  estimate->add_option("--mentions", estimate_options.mention_files,
                       "Mention CSV file(s): entity,class,timestamp")
      ->required()
      ->expected(-1);
  estimate->add_option("--out", estimate_options.output_file, "Output report NDJSON")->required();
  estimate->add_option("--period-days", estimate_options.period_days,
                       "Sample period length in days")
      ->capture_default_str();
  std::int64_t origin_value = 0;
  auto* origin_opt = estimate->add_option(
      "--origin", origin_value,
      "Epoch seconds of period 0 (default: earliest mention, truncated to midnight UTC)");
  estimate->add_option("-w,--window", estimate_options.window, "Convergence window (periods)")
      ->capture_default_str();
  estimate->add_option("--methods", methods_csv,
                       "Comma-separated estimators (default: jack1,n1unif,sor,chao92)");
  estimate->add_option("--threshold-low", estimate_options.threshold_low,
                       "rho below this flags a class complete")
      ->capture_default_str();
  estimate->add_option("--threshold-high", estimate_options.threshold_high,
                       "rho above this flags a class incomplete")
      ->capture_default_str();
  std::filesystem::path ground_truth_path;
  auto* truth_opt = estimate->add_option("--ground-truth", ground_truth_path,
                                         "CSV class,N of known true sizes; adds phi to reports");
  estimate->add_option("--min-observations", estimate_options.min_observations,
                       "Drop classes with fewer total observations")
      ->capture_default_str();
  estimate->add_option("--threads", estimate_options.threads,
                       "Worker threads (default: KGCARD_THREADS or hardware)");
  estimate->add_flag("--rho-extra-sample", estimate_options.rho_extra_sample,
                     "Widen the convergence window by one extra period (comparison mode)");

  // --- simulate --------------------------------------------------------
  kgcard::SimulateOptions simulate_options;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic mention stream with known ground truth");
  simulate->add_option("--scenario", simulate_options.scenario_file, "Scenario key=value file")
      ->required();
  simulate->add_option("--out", simulate_options.output_file,
                       "Output mention CSV (metadata written beside it)")
      ->required();

  // --- rank ------------------------------------------------------------
  kgcard::RankOptions rank_options;
  std::string rank_method = "sor";
  auto* rank = app.add_subcommand(
      "rank", "Partition report files into complete/incomplete candidate rankings");
  rank->add_option("reports", rank_options.report_inputs, "Report NDJSON files or directories")
      ->required()
      ->expected(-1);
  rank->add_option("--method", rank_method, "Estimator whose rho drives the ranking")
      ->capture_default_str();
  rank->add_option("--threshold-low", rank_options.threshold_low, "Complete-candidate cutoff")
      ->capture_default_str();
  rank->add_option("--threshold-high", rank_options.threshold_high, "Incomplete-candidate cutoff")
      ->capture_default_str();
  rank->add_option("--out-prefix", rank_options.output_prefix,
                   "Prefix for <prefix>_complete.csv and <prefix>_incomplete.csv")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kgcard::kExitUsage;
  }

  try {
    if (resolve->parsed()) {
      if (*properties_opt) resolve_options.properties_file = properties_path;
      if (*entity_regex_opt) resolve_options.entity_regex = entity_regex;
      return kgcard::run_resolve(resolve_options, std::cout, std::cerr);
    }
    if (estimate->parsed()) {
      if (*origin_opt) estimate_options.origin = origin_value;
      if (*truth_opt) estimate_options.ground_truth_file = ground_truth_path;
      if (!methods_csv.empty()) estimate_options.methods = parse_method_list(methods_csv);
      return kgcard::run_estimate(estimate_options, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
      return kgcard::run_simulate(simulate_options, std::cout, std::cerr);
    }
    if (rank->parsed()) {
      auto method = kgcard::parse_method(rank_method);
      if (!method) {
        std::cerr << "error: unknown method '" << rank_method << "'\n";
        return kgcard::kExitUsage;
      }
      rank_options.method = *method;
      return kgcard::run_rank(rank_options, std::cout, std::cerr);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kgcard::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kgcard::kExitInputError;
  }
  return kgcard::kExitUsage;
}
