#include "kgcard/observations.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "kgcard/text.hpp"

namespace kgcard {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

// --- FrequencyHistogram -------------------------------------------------

FrequencyHistogram::FrequencyHistogram(std::int64_t period_count, FrequencyMap freq_of_freq)
    : period_count_(period_count), freq_(std::move(freq_of_freq)) {
  if (period_count_ < 1) {
    throw std::invalid_argument("FrequencyHistogram: period count must be >= 1");
  }
  for (const auto& [i, count] : freq_) {
    if (count < 0) throw std::invalid_argument("FrequencyHistogram: negative frequency count");
    if (count == 0) continue;
    if (i < 1 || i > period_count_) {
      throw std::invalid_argument("FrequencyHistogram: frequency index outside [1, k]");
    }
    distinct_count_ += count;
    observation_count_ += i * count;
  }
  std::erase_if(freq_, [](const auto& entry) { return entry.second == 0; });
}

std::int64_t FrequencyHistogram::frequency(std::int64_t i) const {
  auto it = freq_.find(i);
  return it == freq_.end() ? 0 : it->second;
}

// --- PeriodizedObservations ----------------------------------------------

PeriodizedObservations::PeriodizedObservations(std::string class_id, std::int64_t origin,
                                               std::int64_t period_length)
    : class_id_(std::move(class_id)), origin_(origin), period_length_(period_length) {
  if (period_length_ <= 0) {
    throw std::invalid_argument("PeriodizedObservations: period length must be positive");
  }
}

std::uint32_t PeriodizedObservations::intern(std::string_view entity) {
  auto it = handle_by_entity_.find(entity);
  if (it != handle_by_entity_.end()) return it->second;
  auto handle = static_cast<std::uint32_t>(names_.size());
  auto [inserted, ok] = handle_by_entity_.emplace(std::string(entity), handle);
  names_.push_back(inserted->first);  // key storage is node-stable
  return handle;
}

bool PeriodizedObservations::add_mention(std::string_view entity, std::int64_t timestamp) {
  if (timestamp < origin_) {
    ++skipped_pre_origin_;
    return false;
  }
  add_observation(entity, (timestamp - origin_) / period_length_);
  return true;
}

void PeriodizedObservations::add_observation(std::string_view entity, std::int64_t period) {
  if (period < 0) throw std::invalid_argument("add_observation: negative period");
  if (period > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
    throw std::invalid_argument("add_observation: period index exceeds 2^32-1; "
                                "check origin / period length");
  }
  std::uint32_t handle = intern(entity);
  std::uint64_t key = (static_cast<std::uint64_t>(handle) << 32) | static_cast<std::uint64_t>(period);
  if (!seen_.insert(key).second) return;  // duplicate within the period
  periods_[period].push_back(handle);
  period_count_ = std::max(period_count_, period + 1);
}

void PeriodizedObservations::merge_from(const PeriodizedObservations& other) {
  if (other.class_id_ != class_id_ || other.origin_ != origin_ ||
      other.period_length_ != period_length_) {
    throw std::invalid_argument("merge_from: incompatible observation structures");
  }
  for (const auto& [period, handles] : other.periods_) {
    for (std::uint32_t handle : handles) add_observation(other.names_[handle], period);
  }
  skipped_pre_origin_ += other.skipped_pre_origin_;
}

std::vector<std::string> PeriodizedObservations::entities_in(std::int64_t period) const {
  std::vector<std::string> out;
  auto it = periods_.find(period);
  if (it == periods_.end()) return out;
  out.reserve(it->second.size());
  for (std::uint32_t handle : it->second) out.emplace_back(names_[handle]);
  std::sort(out.begin(), out.end());
  return out;
}

// --- Bucketing -------------------------------------------------------------

MentionBucketer::MentionBucketer(std::int64_t origin, std::int64_t period_length)
    : origin_(origin), period_length_(period_length) {
  if (period_length_ <= 0) {
    throw std::invalid_argument("MentionBucketer: period length must be positive");
  }
}

void MentionBucketer::add(std::string_view entity, std::string_view class_id,
                          std::int64_t timestamp) {
  auto it = classes_.find(class_id);
  if (it == classes_.end()) {
    it = classes_
             .emplace(std::string(class_id),
                      PeriodizedObservations(std::string(class_id), origin_, period_length_))
             .first;
  }
  if (!it->second.add_mention(entity, timestamp)) ++skipped_pre_origin_;
}

std::map<std::string, PeriodizedObservations> MentionBucketer::take() {
  std::map<std::string, PeriodizedObservations> out;
  for (auto& [class_id, obs] : classes_) {
    // A class whose every mention fell before the origin has no periods;
    // its skips stay in the aggregate counter.
    if (obs.period_count() > 0) out.emplace(class_id, std::move(obs));
  }
  classes_.clear();
  return out;
}

std::map<std::string, PeriodizedObservations> bucket_mentions(std::span<const Mention> mentions,
                                                              std::int64_t origin,
                                                              std::int64_t period_length,
                                                              std::uint64_t* skipped_pre_origin) {
  MentionBucketer bucketer(origin, period_length);
  for (const Mention& m : mentions) bucketer.add(m);
  if (skipped_pre_origin != nullptr) *skipped_pre_origin = bucketer.skipped_pre_origin();
  return bucketer.take();
}

// --- Histograms --------------------------------------------------------------

FrequencyHistogram histogram_at(const PeriodizedObservations& obs, std::int64_t upto_period) {
  if (upto_period < 0 || upto_period >= obs.period_count()) {
    throw std::out_of_range("histogram_at: period index out of range");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(obs.distinct_count()), 0);
  for (const auto& [period, handles] : obs.period_map()) {
    if (period > upto_period) break;
    for (std::uint32_t handle : handles) ++counts[handle];
  }
  FrequencyHistogram::FrequencyMap freq;
  for (std::int64_t c : counts) {
    if (c > 0) ++freq[c];
  }
  return FrequencyHistogram(upto_period + 1, std::move(freq));
}

std::vector<FrequencyHistogram> series_histograms(const PeriodizedObservations& obs) {
  std::vector<FrequencyHistogram> out;
  const std::int64_t k = obs.period_count();
  if (k == 0) return out;
  out.reserve(static_cast<std::size_t>(k));

  // One cumulative pass: move each observed entity from frequency c to c+1.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(obs.distinct_count()), 0);
  std::vector<std::int64_t> freq(static_cast<std::size_t>(k) + 1, 0);
  auto it = obs.period_map().begin();
  for (std::int64_t period = 0; period < k; ++period) {
    if (it != obs.period_map().end() && it->first == period) {
      for (std::uint32_t handle : it->second) {
        std::int64_t c = counts[handle]++;
        if (c > 0) --freq[c];
        ++freq[c + 1];
      }
      ++it;
    }
    FrequencyHistogram::FrequencyMap snapshot;
    for (std::int64_t i = 1; i <= period + 1; ++i) {
      if (freq[i] > 0) snapshot.emplace(i, freq[i]);
    }
    out.emplace_back(period + 1, std::move(snapshot));
  }
  return out;
}

// --- Mention CSV ----------------------------------------------------------

bool parse_mention_row(std::string_view line, std::string_view& entity, std::string_view& class_id,
                       std::int64_t& timestamp) {
  auto fields = split_fields(line, ',');
  if (fields.size() != 3) return false;
  entity = trim(fields[0]);
  class_id = trim(fields[1]);
  if (entity.empty() || class_id.empty()) return false;
  auto ts = parse_timestamp(fields[2]);
  if (!ts || *ts < 0) return false;
  timestamp = *ts;
  return true;
}

MentionFileStats for_each_mention(const std::filesystem::path& path, const MentionSink& sink) {
  FileHandle file(std::fopen(path.string().c_str(), "rb"));
  if (file == nullptr) {
    throw std::runtime_error("cannot open mention file: " + path.string());
  }
  MentionFileStats stats;
  std::vector<char> buf(1 << 20);
  bool first = true;
  std::string carry;
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), file.get())) > 0) {
    std::string_view chunk(buf.data(), got);
    std::size_t start = 0;
    while (true) {
      std::size_t nl = chunk.find('\n', start);
      if (nl == std::string_view::npos) {
        carry.append(chunk.substr(start));
        break;
      }
      std::string_view raw;
      if (carry.empty()) {
        raw = chunk.substr(start, nl - start);
      } else {
        carry.append(chunk.substr(start, nl - start));
        raw = carry;
      }
      std::string_view row = trim(raw);
      if (!row.empty()) {
        if (first && row == kMentionCsvHeader) {
          // header row
        } else {
          std::string_view entity, class_id;
          std::int64_t ts = 0;
          if (parse_mention_row(row, entity, class_id, ts)) {
            sink(entity, class_id, ts);
            ++stats.rows;
          } else {
            ++stats.bad_rows;
          }
        }
        first = false;
      }
      carry.clear();
      start = nl + 1;
    }
  }
  std::string_view row = trim(carry);
  if (!row.empty()) {
    if (!(first && row == kMentionCsvHeader)) {
      std::string_view entity, class_id;
      std::int64_t ts = 0;
      if (parse_mention_row(row, entity, class_id, ts)) {
        sink(entity, class_id, ts);
        ++stats.rows;
      } else {
        ++stats.bad_rows;
      }
    }
  }
  return stats;
}

MentionCsvWriter::MentionCsvWriter(const std::filesystem::path& path) {
  file_ = std::fopen(path.string().c_str(), "wb");
  if (file_ == nullptr) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  buffer_.reserve(1 << 20);
  buffer_.append(kMentionCsvHeader);
  buffer_.push_back('\n');
}

MentionCsvWriter::~MentionCsvWriter() { close(); }

void MentionCsvWriter::write(std::string_view entity, std::string_view class_id,
                             std::int64_t timestamp) {
  buffer_.append(entity);
  buffer_.push_back(',');
  buffer_.append(class_id);
  buffer_.push_back(',');
  char digits[24];
  auto [ptr, ec] = std::to_chars(digits, digits + sizeof digits, timestamp);
  buffer_.append(digits, ptr);
  buffer_.push_back('\n');
  ++rows_;
  if (buffer_.size() > (1 << 20) - 256) flush_buffer();
}

void MentionCsvWriter::flush_buffer() {
  if (file_ != nullptr && !buffer_.empty()) {
    std::fwrite(buffer_.data(), 1, buffer_.size(), file_);
  }
  buffer_.clear();
}

void MentionCsvWriter::close() {
  if (file_ != nullptr) {
    flush_buffer();
    std::fclose(file_);
    file_ = nullptr;
  }
}

}  // namespace kgcard
