#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kgcard/text.hpp"

namespace kgcard {

/// One timestamped reference to an instance of a class. The atomic input
/// record of the whole pipeline.
struct Mention {
  std::string entity;
  std::string class_id;
  std::int64_t timestamp = 0;  // UTC epoch seconds, >= 0
};

/// Frequency-of-frequencies summary of one class over the first k sample
/// periods: how many distinct entities were observed in exactly i periods.
///
/// Invariants (checked on construction):
///   sum(f_i) == distinct_count, sum(i * f_i) == observation_count,
///   every i with f_i > 0 lies in [1, k], counts non-negative, k >= 1.
class FrequencyHistogram {
 public:
  using FrequencyMap = std::map<std::int64_t, std::int64_t>;

  FrequencyHistogram(std::int64_t period_count, FrequencyMap freq_of_freq);

  std::int64_t period_count() const { return period_count_; }       // k
  std::int64_t distinct_count() const { return distinct_count_; }   // D
  std::int64_t observation_count() const { return observation_count_; }  // n

  /// f_i: number of entities observed in exactly i periods (0 if absent).
  std::int64_t frequency(std::int64_t i) const;
  const FrequencyMap& frequencies() const { return freq_; }

  bool operator==(const FrequencyHistogram& other) const = default;

 private:
  std::int64_t period_count_ = 0;
  std::int64_t distinct_count_ = 0;
  std::int64_t observation_count_ = 0;
  FrequencyMap freq_;
};

/// Per-period deduplicated observations of one class. A mention with
/// timestamp t lands in period floor((t - origin) / period_length); repeated
/// mentions of the same entity in one period collapse to one observation.
/// Periods with no observations between non-empty ones still count toward
/// the period total; periods after the last observation do not exist.
class PeriodizedObservations {
 public:
  PeriodizedObservations(std::string class_id, std::int64_t origin, std::int64_t period_length);

  /// Add one mention. Returns false (and counts the skip) when the
  /// timestamp precedes the origin.
  bool add_mention(std::string_view entity, std::int64_t timestamp);

  /// Add an observation directly into a period (used by merge and tests).
  void add_observation(std::string_view entity, std::int64_t period);

  /// Set-union with another structure for the same class/origin/length.
  /// Associative and commutative, so per-class shards built in parallel
  /// can be combined in any order.
  void merge_from(const PeriodizedObservations& other);

  const std::string& class_id() const { return class_id_; }
  std::int64_t origin() const { return origin_; }
  std::int64_t period_length() const { return period_length_; }

  /// k: index of the last non-empty period plus one (0 when empty).
  std::int64_t period_count() const { return period_count_; }
  std::int64_t distinct_count() const { return static_cast<std::int64_t>(names_.size()); }
  /// Total observation count across all periods (post-deduplication n).
  std::int64_t observation_total() const { return static_cast<std::int64_t>(seen_.size()); }
  std::uint64_t skipped_pre_origin() const { return skipped_pre_origin_; }

  /// Distinct entities observed in one period, sorted (empty for gaps).
  std::vector<std::string> entities_in(std::int64_t period) const;

  /// Internal handle-level view used by the histogram builders: period
  /// index -> duplicate-free entity handles, non-empty periods only.
  const std::map<std::int64_t, std::vector<std::uint32_t>>& period_map() const { return periods_; }
  std::string_view entity_name(std::uint32_t handle) const { return names_[handle]; }

 private:
  std::uint32_t intern(std::string_view entity);

  std::string class_id_;
  std::int64_t origin_;
  std::int64_t period_length_;
  std::int64_t period_count_ = 0;
  std::uint64_t skipped_pre_origin_ = 0;
  StringKeyMap<std::uint32_t> handle_by_entity_;
  std::vector<std::string_view> names_;  // views into handle_by_entity_ keys
  std::unordered_set<std::uint64_t> seen_;  // (handle << 32) | period
  std::map<std::int64_t, std::vector<std::uint32_t>> periods_;
};

/// Streaming partitioner: mentions in (any order), per-class
/// PeriodizedObservations out.
class MentionBucketer {
 public:
  MentionBucketer(std::int64_t origin, std::int64_t period_length);

  void add(std::string_view entity, std::string_view class_id, std::int64_t timestamp);
  void add(const Mention& mention) { add(mention.entity, mention.class_id, mention.timestamp); }

  std::uint64_t skipped_pre_origin() const { return skipped_pre_origin_; }

  /// Hand over all per-class structures, keyed (and ordered) by class id.
  std::map<std::string, PeriodizedObservations> take();

 private:
  std::int64_t origin_;
  std::int64_t period_length_;
  std::uint64_t skipped_pre_origin_ = 0;
  StringKeyMap<PeriodizedObservations> classes_;
};

std::map<std::string, PeriodizedObservations> bucket_mentions(
    std::span<const Mention> mentions, std::int64_t origin, std::int64_t period_length,
    std::uint64_t* skipped_pre_origin = nullptr);

/// Histogram over periods [0, upto_period]. Throws std::out_of_range when
/// upto_period is outside [0, period_count).
FrequencyHistogram histogram_at(const PeriodizedObservations& obs, std::int64_t upto_period);

/// Cumulative histogram per period: element i equals histogram_at(obs, i).
/// Empty input yields an empty list.
std::vector<FrequencyHistogram> series_histograms(const PeriodizedObservations& obs);

// --- Mention file format ----------------------------------------------
//
// UTF-8 CSV with header "entity,class,timestamp"; timestamps are integer
// epoch seconds or ISO-8601, mixed freely. Unparsable lines are counted,
// never fatal.

struct MentionFileStats {
  std::uint64_t rows = 0;        // well-formed data rows delivered
  std::uint64_t bad_rows = 0;    // lines that failed to parse
};

using MentionSink = std::function<void(std::string_view entity, std::string_view class_id,
                                       std::int64_t timestamp)>;

/// Stream a mention CSV file through `sink`. Throws std::runtime_error if
/// the file cannot be opened.
MentionFileStats for_each_mention(const std::filesystem::path& path, const MentionSink& sink);

/// Parse one data row ("entity,class,timestamp"). Returns false on any
/// malformed field.
bool parse_mention_row(std::string_view line, std::string_view& entity, std::string_view& class_id,
                       std::int64_t& timestamp);

inline constexpr std::string_view kMentionCsvHeader = "entity,class,timestamp";

/// Buffered mention CSV writer; writes the header on construction.
class MentionCsvWriter {
 public:
  explicit MentionCsvWriter(const std::filesystem::path& path);
  ~MentionCsvWriter();
  MentionCsvWriter(const MentionCsvWriter&) = delete;
  MentionCsvWriter& operator=(const MentionCsvWriter&) = delete;

  void write(std::string_view entity, std::string_view class_id, std::int64_t timestamp);
  std::uint64_t rows_written() const { return rows_; }
  void close();

 private:
  void flush_buffer();

  std::FILE* file_ = nullptr;
  std::string buffer_;
  std::uint64_t rows_ = 0;
};

}  // namespace kgcard
