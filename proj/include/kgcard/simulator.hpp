#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgcard/observations.hpp"

namespace kgcard {

enum class DistributionKind { uniform, zipf };

/// Synthetic ground-truth population: the true size and each instance's
/// capture probability.
struct Population {
  std::int64_t size = 0;
  DistributionKind kind = DistributionKind::uniform;
  double zipf_exponent = 0.0;             // meaningful for zipf only
  std::vector<double> probabilities;      // length == size, sums to 1
};

/// uniform: p_i = 1/N. zipf(s): p_i proportional to 1/i^s, s > 0.
Population make_population(std::int64_t size, DistributionKind kind, double zipf_exponent = 1.0);

/// A one-time batch import: `count` previously unseen instances each
/// mentioned exactly once in the given period, inflating the singleton
/// count the way bulk inserts do.
struct BurstSpec {
  std::int64_t period = 0;
  std::int64_t count = 0;
};

struct ScenarioSpec {
  std::string class_id = "synthetic";
  Population population;
  std::int64_t periods = 0;
  std::int64_t draws_per_period = 0;
  std::vector<BurstSpec> bursts;
  std::uint64_t seed = 0;
  std::int64_t origin = 0;
  std::int64_t period_length = 30 * kSecondsPerDay;

  /// Throws std::invalid_argument when any field is out of contract.
  void validate() const;
};

/// Identity string of the pseudo-random scheme, embedded in scenario
/// metadata. Streams depend only on the seed and this scheme:
/// std::mt19937_64 (bit-exact per the C++ standard) producing 53-bit
/// uniform doubles, inverse-CDF sampling over the cumulative probability
/// vector, and index draws by floor(u * remaining) for burst picks.
std::string_view generator_identity();

struct SimulationStats {
  std::uint64_t mentions = 0;
  std::uint64_t burst_mentions = 0;
  std::vector<std::string> warnings;  // e.g. a burst saturating the unseen pool
};

/// Generate the mention stream for one synthetic class: per period,
/// draws_per_period independent draws with replacement, timestamped at the
/// period midpoint, plus any burst injections. Deterministic given the
/// seed.
SimulationStats simulate(const ScenarioSpec& spec, const MentionSink& sink);

/// Convenience wrapper materializing the stream.
std::vector<Mention> simulate(const ScenarioSpec& spec, SimulationStats* stats = nullptr);

/// Brute-force histogram oracle: rebuilds per-period sets with no
/// streaming shortcuts. Treats the input as one class's mentions (the
/// class field is not consulted); mentions before the origin are skipped
/// like everywhere else. Test-scale only.
FrequencyHistogram naive_frequency_count(std::span<const Mention> mentions, std::int64_t origin,
                                         std::int64_t period_length);

// --- Scenario file ----------------------------------------------------
//
// Line-oriented key = value text; '#' starts a comment. Keys:
//   class_id          token, default "synthetic"
//   population_size   integer >= 1                  (required)
//   distribution      uniform | zipf                (required)
//   zipf_exponent     real > 0, required for zipf
//   periods           integer >= 1                  (required)
//   draws_per_period  integer >= 1                  (required)
//   seed              unsigned 64-bit               (required)
//   burst             "period:count", repeatable
//   origin            epoch seconds, default 0
//   period_length_days  real > 0, default 30

ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

}  // namespace kgcard
