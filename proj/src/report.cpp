#include "kgcard/report.hpp"

#include <nlohmann/json.hpp>

namespace kgcard {

using nlohmann::json;

std::string_view completeness_name(CompletenessFlag flag) {
  switch (flag) {
    case CompletenessFlag::complete: return "complete";
    case CompletenessFlag::incomplete: return "incomplete";
    case CompletenessFlag::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ClassReport build_class_report(const PeriodizedObservations& obs, const ReportConfig& config,
                               std::optional<double> ground_truth) {
  ClassReport report;
  report.class_id = obs.class_id();
  CompositeClassSpec spec = parse_class_token(report.class_id);
  report.filters = std::move(spec.filters);
  report.config = config;
  report.skipped_pre_origin = obs.skipped_pre_origin();
  report.series = build_series(obs, config.methods);
  report.ground_truth = ground_truth;

  const std::vector<std::int64_t> distincts = report.series.distincts();
  for (Method method : config.methods) {
    const auto values = report.series.values_of(method);
    auto rho = rho_convergence(values, distincts, config.window, config.rho_extra_sample);
    CompletenessFlag flag = CompletenessFlag::indeterminate;
    if (rho) {
      if (*rho < config.threshold_low) {
        flag = CompletenessFlag::complete;
      } else if (*rho > config.threshold_high) {
        flag = CompletenessFlag::incomplete;
      }
    }
    report.rho.emplace(method, rho);
    report.flags.emplace(method, flag);
    if (ground_truth) report.phi.emplace(method, phi_error(values, *ground_truth));
  }
  if (ground_truth) {
    std::vector<std::optional<double>> lower_bound;
    lower_bound.reserve(distincts.size());
    for (std::int64_t d : distincts) lower_bound.emplace_back(static_cast<double>(d));
    report.phi_distinct = phi_error(lower_bound, *ground_truth);
  }
  return report;
}

namespace {

json optional_to_json(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

json report_to_json(const ClassReport& report) {
  json methods = json::array();
  for (Method m : report.config.methods) methods.push_back(std::string(method_name(m)));

  json config{{"period_length_s", report.config.period_length},
              {"origin", report.config.origin},
              {"window", report.config.window},
              {"methods", methods},
              {"threshold_low", report.config.threshold_low},
              {"threshold_high", report.config.threshold_high},
              {"min_observations", report.config.min_observations},
              {"rho_extra_sample", report.config.rho_extra_sample}};
  // jack2 ships outside the default set: it over-estimates large samples.
  for (Method m : report.config.methods) {
    if (m == Method::jack2) config["experimental"] = json::array({"jack2"});
  }

  json filters = json::array();
  for (const auto& [property, target] : report.filters) {
    filters.push_back(json{{"property", property}, {"target", target}});
  }

  json series = json::array();
  for (const PeriodRecord& p : report.series.points) {
    json estimates;
    for (std::size_t i = 0; i < report.series.methods.size(); ++i) {
      const Estimate& e = p.estimates[i];
      estimates[std::string(method_name(report.series.methods[i]))] =
          e.defined ? json(e.value) : json(nullptr);
    }
    series.push_back(json{{"period", p.period},
                          {"distinct", p.distinct},
                          {"observations", p.observations},
                          {"singletons", p.singletons},
                          {"estimates", std::move(estimates)}});
  }

  json rho, flags, phi;
  for (const auto& [method, value] : report.rho) {
    rho[std::string(method_name(method))] = optional_to_json(value);
  }
  for (const auto& [method, flag] : report.flags) {
    flags[std::string(method_name(method))] = std::string(completeness_name(flag));
  }
  for (const auto& [method, value] : report.phi) {
    phi[std::string(method_name(method))] = optional_to_json(value);
  }

  json out{{"class", report.class_id},
           {"filters", std::move(filters)},
           {"config", std::move(config)},
           {"distinct", report.final_distinct()},
           {"series", std::move(series)},
           {"rho", std::move(rho)},
           {"completeness", std::move(flags)},
           {"skipped", json{{"pre_origin", report.skipped_pre_origin}}}};
  if (report.ground_truth) {
    out["ground_truth"] = *report.ground_truth;
    out["phi"] = std::move(phi);
    out["phi_distinct"] = optional_to_json(report.phi_distinct);
  }
  return out;
}

std::optional<ReportDigest> parse_report_digest(std::string_view line) {
  json parsed = json::parse(line, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  if (!parsed.contains("class") || !parsed.contains("rho") || !parsed.contains("distinct")) {
    return std::nullopt;
  }
  ReportDigest digest;
  if (!parsed["class"].is_string() || !parsed["distinct"].is_number()) return std::nullopt;
  digest.class_id = parsed["class"].get<std::string>();
  digest.distinct = parsed["distinct"].get<std::int64_t>();
  if (!parsed["rho"].is_object()) return std::nullopt;
  for (const auto& [key, value] : parsed["rho"].items()) {
    if (value.is_number()) {
      digest.rho.emplace(key, value.get<double>());
    } else {
      digest.rho.emplace(key, std::nullopt);
    }
  }
  return digest;
}

CompositeClassSpec parse_class_token(std::string_view token) {
  CompositeClassSpec spec;
  auto amp = token.find('&');
  if (amp == std::string_view::npos) {
    spec.base_class = std::string(token);
    return spec;
  }
  spec.base_class = std::string(token.substr(0, amp));
  std::string_view rest = token.substr(amp + 1);
  while (!rest.empty()) {
    auto next = rest.find('&');
    std::string_view part = next == std::string_view::npos ? rest : rest.substr(0, next);
    auto eq = part.find('=');
    if (eq != std::string_view::npos) {
      spec.filters.emplace_back(std::string(part.substr(0, eq)), std::string(part.substr(eq + 1)));
    }
    if (next == std::string_view::npos) break;
    rest = rest.substr(next + 1);
  }
  return spec;
}

}  // namespace kgcard
