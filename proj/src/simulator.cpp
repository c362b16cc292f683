#include "kgcard/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kgcard/text.hpp"

namespace kgcard {

namespace {

// 53-bit uniform double in [0, 1). The engine is bit-exact across
// platforms per the standard; the transforms below avoid the
// implementation-defined std::*_distribution classes so streams reproduce
// everywhere.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::string entity_id(std::size_t index) {
  return "e" + std::to_string(index + 1);  // 1-based, matching probability rank
}

}  // namespace

Population make_population(std::int64_t size, DistributionKind kind, double zipf_exponent) {
  if (size < 1) throw std::invalid_argument("make_population: size must be >= 1");
  Population pop;
  pop.size = size;
  pop.kind = kind;
  pop.probabilities.resize(static_cast<std::size_t>(size));
  if (kind == DistributionKind::uniform) {
    const double p = 1.0 / static_cast<double>(size);
    std::fill(pop.probabilities.begin(), pop.probabilities.end(), p);
  } else {
    if (!(zipf_exponent > 0.0)) {
      throw std::invalid_argument("make_population: zipf exponent must be > 0");
    }
    pop.zipf_exponent = zipf_exponent;
    double norm = 0.0;
    for (std::int64_t i = 1; i <= size; ++i) {
      norm += 1.0 / std::pow(static_cast<double>(i), zipf_exponent);
    }
    for (std::int64_t i = 1; i <= size; ++i) {
      pop.probabilities[static_cast<std::size_t>(i - 1)] =
          1.0 / std::pow(static_cast<double>(i), zipf_exponent) / norm;
    }
  }
  return pop;
}

void ScenarioSpec::validate() const {
  if (population.size < 1) throw std::invalid_argument("scenario: population size must be >= 1");
  if (population.probabilities.size() != static_cast<std::size_t>(population.size)) {
    throw std::invalid_argument("scenario: probability vector does not match population size");
  }
  double total = 0.0;
  for (double p : population.probabilities) {
    if (!(p > 0.0)) throw std::invalid_argument("scenario: probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("scenario: probabilities must sum to 1");
  }
  if (periods < 1) throw std::invalid_argument("scenario: periods must be >= 1");
  if (draws_per_period < 1) {
    throw std::invalid_argument("scenario: draws_per_period must be >= 1");
  }
  if (period_length <= 0) throw std::invalid_argument("scenario: period length must be positive");
  if (origin < 0) throw std::invalid_argument("scenario: origin must be >= 0");
  if (class_id.empty()) throw std::invalid_argument("scenario: class_id must be non-empty");
  for (const BurstSpec& b : bursts) {
    if (b.period < 0 || b.period >= periods) {
      throw std::invalid_argument("scenario: burst period out of range");
    }
    if (b.count < 1 || b.count > population.size) {
      throw std::invalid_argument("scenario: burst count must be in [1, population size]");
    }
  }
}

std::string_view generator_identity() { return "mt19937_64/unit53/inverse-cdf-v1"; }

SimulationStats simulate(const ScenarioSpec& spec, const MentionSink& sink) {
  spec.validate();
  SimulationStats stats;

  std::vector<double> cumulative(spec.population.probabilities.size());
  double running = 0.0;
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    running += spec.population.probabilities[i];
    cumulative[i] = running;
  }
  cumulative.back() = 1.0;

  std::mt19937_64 rng(spec.seed);
  std::vector<bool> seen(cumulative.size(), false);
  std::size_t seen_count = 0;

  for (std::int64_t period = 0; period < spec.periods; ++period) {
    const std::int64_t midpoint = spec.origin + period * spec.period_length + spec.period_length / 2;
    for (std::int64_t draw = 0; draw < spec.draws_per_period; ++draw) {
      std::size_t index = sample_index(cumulative, next_unit(rng));
      if (!seen[index]) {
        seen[index] = true;
        ++seen_count;
      }
      sink(entity_id(index), spec.class_id, midpoint);
      ++stats.mentions;
    }
    for (const BurstSpec& burst : spec.bursts) {
      if (burst.period != period) continue;
      std::vector<std::uint32_t> unseen;
      unseen.reserve(cumulative.size() - seen_count);
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) unseen.push_back(static_cast<std::uint32_t>(i));
      }
      auto wanted = static_cast<std::size_t>(burst.count);
      if (wanted > unseen.size()) {
        std::ostringstream msg;
        msg << "burst at period " << period << " asked for " << wanted
            << " fresh instances but only " << unseen.size() << " remain unseen";
        stats.warnings.push_back(msg.str());
        wanted = unseen.size();
      }
      // Partial Fisher-Yates over the unseen pool, driven by the seeded
      // stream so the pick is reproducible.
      for (std::size_t j = 0; j < wanted; ++j) {
        const std::size_t remaining = unseen.size() - j;
        auto offset = static_cast<std::size_t>(next_unit(rng) * static_cast<double>(remaining));
        if (offset >= remaining) offset = remaining - 1;
        std::swap(unseen[j], unseen[j + offset]);
        const std::size_t index = unseen[j];
        seen[index] = true;
        ++seen_count;
        sink(entity_id(index), spec.class_id, midpoint);
        ++stats.mentions;
        ++stats.burst_mentions;
      }
    }
  }
  return stats;
}

std::vector<Mention> simulate(const ScenarioSpec& spec, SimulationStats* stats) {
  std::vector<Mention> out;
  SimulationStats s = simulate(spec, [&out](std::string_view entity, std::string_view class_id,
                                            std::int64_t timestamp) {
    out.push_back({std::string(entity), std::string(class_id), timestamp});
  });
  if (stats != nullptr) *stats = std::move(s);
  return out;
}

FrequencyHistogram naive_frequency_count(std::span<const Mention> mentions, std::int64_t origin,
                                         std::int64_t period_length) {
  if (period_length <= 0) {
    throw std::invalid_argument("naive_frequency_count: period length must be positive");
  }
  std::map<std::int64_t, std::set<std::string>> periods;
  std::int64_t last_period = 0;
  bool any = false;
  for (const Mention& m : mentions) {
    if (m.timestamp < origin) continue;  // same skip rule as the streaming path
    const std::int64_t period = (m.timestamp - origin) / period_length;
    periods[period].insert(m.entity);
    last_period = std::max(last_period, period);
    any = true;
  }
  std::map<std::string, std::int64_t> per_entity;
  for (const auto& [period, entities] : periods) {
    for (const std::string& e : entities) ++per_entity[e];
  }
  FrequencyHistogram::FrequencyMap freq;
  for (const auto& [entity, count] : per_entity) ++freq[count];
  return FrequencyHistogram(any ? last_period + 1 : 1, std::move(freq));
}

// --- Scenario file ----------------------------------------------------

ScenarioSpec parse_scenario(std::istream& in) {
  std::string line;
  StringKeyMap<std::string> values;
  std::vector<BurstSpec> bursts;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = trim(line);
    if (auto hash = text.find('#'); hash != std::string_view::npos) {
      text = trim(text.substr(0, hash));
    }
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("scenario line " + std::to_string(line_number) +
                                  ": expected key = value");
    }
    std::string key(trim(text.substr(0, eq)));
    std::string value(trim(text.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("scenario line " + std::to_string(line_number) +
                                  ": empty key or value");
    }
    if (key == "burst") {
      auto colon = value.find(':');
      auto period = colon == std::string::npos
                        ? std::nullopt
                        : parse_integer(std::string_view(value).substr(0, colon));
      auto count = colon == std::string::npos
                       ? std::nullopt
                       : parse_integer(std::string_view(value).substr(colon + 1));
      if (!period || !count) {
        throw std::invalid_argument("scenario line " + std::to_string(line_number) +
                                    ": burst must be period:count");
      }
      bursts.push_back({*period, *count});
      continue;
    }
    if (!values.emplace(key, value).second) {
      throw std::invalid_argument("scenario: duplicate key '" + key + "'");
    }
  }

  auto required = [&](std::string_view key) -> const std::string& {
    auto it = values.find(key);
    if (it == values.end()) {
      throw std::invalid_argument("scenario: missing required key '" + std::string(key) + "'");
    }
    return it->second;
  };
  auto required_int = [&](std::string_view key) {
    auto v = parse_integer(required(key));
    if (!v) throw std::invalid_argument("scenario: '" + std::string(key) + "' must be an integer");
    return *v;
  };

  ScenarioSpec spec;
  if (auto it = values.find("class_id"); it != values.end()) spec.class_id = it->second;

  const std::string& dist = required("distribution");
  const std::int64_t size = required_int("population_size");
  if (dist == "uniform") {
    spec.population = make_population(size, DistributionKind::uniform);
  } else if (dist == "zipf") {
    auto it = values.find("zipf_exponent");
    if (it == values.end()) {
      throw std::invalid_argument("scenario: zipf distribution needs zipf_exponent");
    }
    double s = 0.0;
    try {
      s = std::stod(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument("scenario: zipf_exponent must be a number");
    }
    spec.population = make_population(size, DistributionKind::zipf, s);
  } else {
    throw std::invalid_argument("scenario: distribution must be uniform or zipf");
  }

  spec.periods = required_int("periods");
  spec.draws_per_period = required_int("draws_per_period");
  spec.seed = static_cast<std::uint64_t>(required_int("seed"));
  spec.bursts = std::move(bursts);
  if (auto it = values.find("origin"); it != values.end()) {
    auto v = parse_integer(it->second);
    if (!v) throw std::invalid_argument("scenario: origin must be an integer");
    spec.origin = *v;
  }
  if (auto it = values.find("period_length_days"); it != values.end()) {
    double days = 0.0;
    try {
      days = std::stod(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument("scenario: period_length_days must be a number");
    }
    if (!(days > 0.0)) throw std::invalid_argument("scenario: period_length_days must be > 0");
    spec.period_length = static_cast<std::int64_t>(days * kSecondsPerDay);
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  return parse_scenario(in);
}

}  // namespace kgcard
