#include "kgcard/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "kgcard/simulator.hpp"
#include "kgcard/text.hpp"

namespace kgcard {

namespace {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KGCARD_THREADS")) {
    if (auto parsed = parse_integer(env); parsed && *parsed > 0 && *parsed <= 1024) {
      return static_cast<int>(*parsed);
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::optional<StringKeyMap<double>> load_ground_truth(const std::filesystem::path& path,
                                                      std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open ground-truth file: " << path.string() << "\n";
    return std::nullopt;
  }
  StringKeyMap<double> truth;
  std::string line;
  std::uint64_t bad = 0;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view text = trim(line);
    if (text.empty()) continue;
    if (first && (text == "class,N" || text == "class,n")) {
      first = false;
      continue;
    }
    first = false;
    auto fields = split_fields(text, ',');
    std::optional<std::int64_t> n;
    if (fields.size() == 2) n = parse_integer(fields[1]);
    if (fields.size() != 2 || trim(fields[0]).empty() || !n || *n <= 0) {
      ++bad;
      continue;
    }
    truth[std::string(trim(fields[0]))] = static_cast<double>(*n);
  }
  if (bad > 0) err << "warning: " << bad << " unparsable ground-truth line(s) skipped\n";
  return truth;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// --- resolve -----------------------------------------------------------

int run_resolve(const ResolveOptions& options, std::ostream& out, std::ostream& err) {
  bool needs_properties = false;
  for (const CompositeClassSpec& spec : options.class_specs) {
    if (!spec.filters.empty()) needs_properties = true;
  }
  if (needs_properties && !options.properties_file) {
    err << "error: --where constraints require --properties\n";
    return kExitUsage;
  }

  OntologyIndex index;
  TsvStats ontology_stats;
  PropertyGraph properties;
  TsvStats property_stats;
  try {
    ontology_stats = load_ontology_tsv(options.ontology_file, index);
    if (options.properties_file) {
      property_stats = load_property_tsv(*options.properties_file, properties);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  EntityTokenRule rule = EntityTokenRule::default_rule();
  if (options.entity_regex) {
    try {
      rule = EntityTokenRule::from_regex(*options.entity_regex);
    } catch (const std::exception& e) {
      err << "error: bad --entity-regex: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  EditResolver resolver(index, rule);
  if (!options.class_specs.empty()) {
    resolver.set_filter(options.class_specs,
                        options.properties_file ? &properties : nullptr);
  }

  TsvStats edit_stats;
  try {
    MentionCsvWriter writer(options.output_file);
    edit_stats = for_each_edit(
        options.edits_file,
        [&](std::string_view subject, std::string_view, std::string_view object,
            std::int64_t timestamp, std::string_view) {
          resolver.resolve(subject, object, timestamp,
                           [&writer](std::string_view entity, std::string_view class_id,
                                     std::int64_t ts) { writer.write(entity, class_id, ts); });
        });
    writer.close();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const ResolveCounters& counters = resolver.counters();
  out << "ontology statements: " << ontology_stats.rows
      << " (unknown relation: " << ontology_stats.unknown_relation
      << ", malformed: " << ontology_stats.bad_rows << ")\n";
  if (options.properties_file) {
    out << "property statements: " << property_stats.rows
        << " (malformed: " << property_stats.bad_rows << ")\n";
  }
  out << "edits read: " << counters.edits << "\n"
      << "edits contributing mentions: " << counters.with_mentions << "\n"
      << "edits skipped (no class): " << counters.without_mentions << "\n"
      << "edit lines malformed: " << edit_stats.bad_rows << "\n"
      << "literal objects: " << counters.literal_objects << "\n"
      << "mentions emitted: " << counters.mentions << "\n";
  return kExitOk;
}

// --- estimate ----------------------------------------------------------

int run_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err) {
  if (options.mention_files.empty()) {
    err << "error: at least one mention file is required\n";
    return kExitUsage;
  }
  if (!(options.period_days > 0.0)) {
    err << "error: --period-days must be positive\n";
    return kExitUsage;
  }
  if (options.window < 1) {
    err << "error: --window must be >= 1\n";
    return kExitUsage;
  }
  if (options.methods.empty()) {
    err << "error: no estimation methods selected\n";
    return kExitUsage;
  }
  if (options.threshold_low > options.threshold_high) {
    err << "error: --threshold-low must not exceed --threshold-high\n";
    return kExitUsage;
  }

  StringKeyMap<double> ground_truth;
  if (options.ground_truth_file) {
    auto loaded = load_ground_truth(*options.ground_truth_file, err);
    if (!loaded) return kExitInputError;
    ground_truth = std::move(*loaded);
  }

  const auto period_length = static_cast<std::int64_t>(options.period_days * kSecondsPerDay);

  // Without an explicit origin, scan once for the earliest timestamp and
  // truncate it to midnight UTC.
  std::int64_t origin = 0;
  std::uint64_t parse_errors = 0;
  try {
    if (options.origin) {
      origin = *options.origin;
    } else {
      std::int64_t min_ts = std::numeric_limits<std::int64_t>::max();
      for (const auto& path : options.mention_files) {
        for_each_mention(path, [&min_ts](std::string_view, std::string_view, std::int64_t ts) {
          min_ts = std::min(min_ts, ts);
        });
      }
      origin = min_ts == std::numeric_limits<std::int64_t>::max() ? 0
                                                                  : truncate_to_midnight(min_ts);
    }

    MentionBucketer bucketer(origin, period_length);
    std::uint64_t rows = 0;
    for (const auto& path : options.mention_files) {
      MentionFileStats stats =
          for_each_mention(path, [&bucketer](std::string_view entity, std::string_view class_id,
                                             std::int64_t ts) { bucketer.add(entity, class_id, ts); });
      rows += stats.rows;
      parse_errors += stats.bad_rows;
    }

    std::map<std::string, PeriodizedObservations> classes = bucketer.take();
    std::uint64_t dropped_min_obs = 0;
    for (auto it = classes.begin(); it != classes.end();) {
      if (it->second.observation_total() < options.min_observations) {
        ++dropped_min_obs;
        it = classes.erase(it);
      } else {
        ++it;
      }
    }

    ReportConfig config;
    config.period_length = period_length;
    config.origin = origin;
    config.window = options.window;
    config.methods = options.methods;
    config.threshold_low = options.threshold_low;
    config.threshold_high = options.threshold_high;
    config.min_observations = options.min_observations;
    config.rho_extra_sample = options.rho_extra_sample;

    std::vector<const PeriodizedObservations*> work;
    work.reserve(classes.size());
    for (const auto& [class_id, obs] : classes) work.push_back(&obs);

    std::vector<ClassReport> reports(work.size());
    const int threads =
        std::max(1, std::min<int>(worker_count(options.threads), static_cast<int>(work.size())));
    auto compute = [&](const PeriodizedObservations& obs) {
      std::optional<double> truth;
      if (auto it = ground_truth.find(obs.class_id()); it != ground_truth.end()) {
        truth = it->second;
      }
      return build_class_report(obs, config, truth);
    };
    if (threads <= 1 || work.size() <= 1) {
      for (std::size_t i = 0; i < work.size(); ++i) reports[i] = compute(*work[i]);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            reports[i] = compute(*work[i]);
          }
        });
      }
      for (std::thread& t : pool) t.join();
    }

    std::ofstream output(options.output_file, std::ios::binary);
    if (!output) {
      err << "error: cannot open output file: " << options.output_file.string() << "\n";
      return kExitInputError;
    }
    for (const ClassReport& report : reports) {
      output << report_to_json(report).dump() << "\n";
    }

    out << "mention rows: " << rows << " (malformed: " << parse_errors << ")\n"
        << "classes reported: " << reports.size();
    if (dropped_min_obs > 0) out << " (dropped below min-observations: " << dropped_min_obs << ")";
    out << "\n"
        << "origin: " << origin << "\n"
        << "skipped pre-origin mentions: " << bucketer.skipped_pre_origin() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

// --- simulate ----------------------------------------------------------

int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  ScenarioSpec spec;
  try {
    spec = load_scenario_file(options.scenario_file);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  SimulationStats stats;
  try {
    MentionCsvWriter writer(options.output_file);
    stats = simulate(spec, [&writer](std::string_view entity, std::string_view class_id,
                                     std::int64_t ts) { writer.write(entity, class_id, ts); });
    writer.close();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  nlohmann::json meta{
      {"class_id", spec.class_id},
      {"population_size", spec.population.size},
      {"distribution", spec.population.kind == DistributionKind::uniform ? "uniform" : "zipf"},
      {"periods", spec.periods},
      {"draws_per_period", spec.draws_per_period},
      {"seed", spec.seed},
      {"origin", spec.origin},
      {"period_length_s", spec.period_length},
      {"generator", std::string(generator_identity())},
      {"mentions", stats.mentions},
      {"burst_mentions", stats.burst_mentions},
      {"warnings", stats.warnings}};
  if (spec.population.kind == DistributionKind::zipf) {
    meta["zipf_exponent"] = spec.population.zipf_exponent;
  }
  if (!spec.bursts.empty()) {
    nlohmann::json bursts = nlohmann::json::array();
    for (const BurstSpec& b : spec.bursts) {
      bursts.push_back(nlohmann::json{{"period", b.period}, {"count", b.count}});
    }
    meta["bursts"] = std::move(bursts);
  }
  std::filesystem::path meta_path = options.output_file;
  meta_path += ".meta.json";
  std::ofstream meta_out(meta_path, std::ios::binary);
  if (!meta_out) {
    err << "error: cannot open metadata file: " << meta_path.string() << "\n";
    return kExitInputError;
  }
  meta_out << meta.dump(2) << "\n";

  for (const std::string& w : stats.warnings) err << "warning: " << w << "\n";
  out << "mentions written: " << stats.mentions << " (burst: " << stats.burst_mentions << ")\n"
      << "metadata: " << meta_path.string() << "\n";
  return kExitOk;
}

// --- rank --------------------------------------------------------------

int run_rank(const RankOptions& options, std::ostream& out, std::ostream& err) {
  if (options.report_inputs.empty()) {
    err << "error: at least one report file or directory is required\n";
    return kExitUsage;
  }
  if (options.threshold_low > options.threshold_high) {
    err << "error: --threshold-low must not exceed --threshold-high\n";
    return kExitUsage;
  }

  std::vector<std::filesystem::path> files;
  for (const auto& input : options.report_inputs) {
    std::error_code ec;
    if (std::filesystem::is_directory(input, ec)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(input, ec)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext == ".ndjson" || ext == ".jsonl" || ext == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(input);
    }
  }

  const std::string method_key{method_name(options.method)};
  std::map<std::string, ClassConvergence> by_class;
  std::uint64_t bad_lines = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      err << "error: cannot open report file: " << path.string() << "\n";
      return kExitInputError;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto digest = parse_report_digest(line);
      if (!digest) {
        ++bad_lines;
        continue;
      }
      ClassConvergence entry;
      entry.class_id = digest->class_id;
      entry.distinct = digest->distinct;
      if (auto it = digest->rho.find(method_key); it != digest->rho.end()) entry.rho = it->second;
      auto [pos, inserted] = by_class.insert_or_assign(digest->class_id, std::move(entry));
      if (!inserted) {
        err << "warning: duplicate report for class " << digest->class_id
            << "; keeping the last one read\n";
      }
    }
  }
  if (bad_lines > 0) err << "warning: " << bad_lines << " unparsable report line(s) skipped\n";

  std::vector<ClassConvergence> classes;
  classes.reserve(by_class.size());
  for (auto& [id, entry] : by_class) classes.push_back(std::move(entry));
  ConvergenceRanking ranking =
      rank_by_convergence(classes, options.threshold_low, options.threshold_high);

  auto write_csv = [&](const std::filesystem::path& path,
                       const std::vector<RankedClass>& rows) -> bool {
    std::ofstream csv(path, std::ios::binary);
    if (!csv) {
      err << "error: cannot open output file: " << path.string() << "\n";
      return false;
    }
    csv << "class,rho,distinct\n";
    for (const RankedClass& row : rows) {
      csv << row.class_id << "," << format_double(row.rho) << "," << row.distinct << "\n";
    }
    return true;
  };

  std::filesystem::path complete_path = options.output_prefix;
  complete_path += "_complete.csv";
  std::filesystem::path incomplete_path = options.output_prefix;
  incomplete_path += "_incomplete.csv";
  if (!write_csv(complete_path, ranking.complete_candidates)) return kExitInputError;
  if (!write_csv(incomplete_path, ranking.incomplete_candidates)) return kExitInputError;

  out << "classes ranked: " << by_class.size() << "\n"
      << "complete candidates: " << ranking.complete_candidates.size() << " -> "
      << complete_path.string() << "\n"
      << "incomplete candidates: " << ranking.incomplete_candidates.size() << " -> "
      << incomplete_path.string() << "\n"
      << "classes without usable rho: " << ranking.undefined_count << "\n";
  return kExitOk;
}

}  // namespace kgcard
