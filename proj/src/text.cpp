#include "kgcard/text.hpp"

#include <charconv>

namespace kgcard {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(std::int64_t y, int m) {
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

// Parses exactly `width` digits at s[pos..]; advances pos.
std::optional<int> take_digits(std::string_view s, std::size_t& pos, int width) {
  if (pos + static_cast<std::size_t>(width) > s.size()) return std::nullopt;
  int value = 0;
  for (int i = 0; i < width; ++i) {
    char c = s[pos + static_cast<std::size_t>(i)];
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(width);
  return value;
}

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  std::size_t pos = 0;
  auto year = take_digits(s, pos, 4);
  if (!year || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto month = take_digits(s, pos, 2);
  if (!month || pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  auto day = take_digits(s, pos, 2);
  if (!day) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  if (*day < 1 || *day > days_in_month(*year, *month)) return std::nullopt;

  std::int64_t seconds = days_from_civil(*year, *month, *day) * kSecondsPerDay;

  if (pos < s.size()) {
    char sep = s[pos];
    if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
    ++pos;
    auto hour = take_digits(s, pos, 2);
    if (!hour || pos >= s.size() || s[pos] != ':') return std::nullopt;
    ++pos;
    auto minute = take_digits(s, pos, 2);
    if (!minute) return std::nullopt;
    int second = 0;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      auto sec = take_digits(s, pos, 2);
      if (!sec) return std::nullopt;
      second = *sec;
    }
    if (*hour > 23 || *minute > 59 || second > 60) return std::nullopt;
    seconds += static_cast<std::int64_t>(*hour) * 3600 + *minute * 60 + second;

    if (pos < s.size()) {
      char z = s[pos];
      if (z == 'Z' || z == 'z') {
        ++pos;
      } else if (z == '+' || z == '-') {
        ++pos;
        auto off_h = take_digits(s, pos, 2);
        if (!off_h) return std::nullopt;
        int off_m = 0;
        if (pos < s.size() && s[pos] == ':') ++pos;
        if (pos < s.size()) {
          auto om = take_digits(s, pos, 2);
          if (!om) return std::nullopt;
          off_m = *om;
        }
        std::int64_t offset = static_cast<std::int64_t>(*off_h) * 3600 + off_m * 60;
        seconds += (z == '+') ? -offset : offset;
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  return seconds;
}

}  // namespace

std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<std::uint64_t>(y - era * 400);
  const auto doy = static_cast<std::uint64_t>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const std::uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t truncate_to_midnight(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / kSecondsPerDay;
  if (epoch_seconds < 0 && epoch_seconds % kSecondsPerDay != 0) --days;
  return days * kSecondsPerDay;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (all_digits(text)) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
  }
  return parse_iso8601(text);
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(delimiter, start);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  text = trim(text);
  if (!all_digits(text)) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() &&
         (text.back() == ' ' || text.back() == '\t' || text.back() == '\r' || text.back() == '\n')) {
    text.remove_suffix(1);
  }
  return text;
}

}  // namespace kgcard
