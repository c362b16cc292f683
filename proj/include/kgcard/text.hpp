#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgcard {

/// Heterogeneous hashing so string-keyed maps accept string_view lookups
/// without a temporary allocation.
struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename Value>
using StringKeyMap = std::unordered_map<std::string, Value, TransparentStringHash, std::equal_to<>>;

// Seconds per day; all timestamps are UTC epoch seconds.
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parse a timestamp field. Accepts plain integer epoch seconds
/// ("1534567890") or ISO-8601 ("2018-08-18", "2018-08-18T12:34:56Z",
/// "2018-08-18 12:34:56+02:00"). Returns nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// Days since 1970-01-01 for a proleptic Gregorian calendar date.
std::int64_t days_from_civil(std::int64_t year, int month, int day);

/// Truncate an epoch-seconds timestamp down to 00:00:00 UTC of its day.
std::int64_t truncate_to_midnight(std::int64_t epoch_seconds);

/// Split a line into fields on a single-character delimiter. No quoting:
/// all file formats here carry opaque tokens that never contain the
/// delimiter.
std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

/// Strict non-negative integer parse of a whole token.
std::optional<std::int64_t> parse_integer(std::string_view text);

/// Strip trailing '\r' (CRLF input) and surrounding spaces/tabs.
std::string_view trim(std::string_view text);

}  // namespace kgcard
