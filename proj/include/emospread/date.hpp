#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace emospread {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

Date make_date(int year, unsigned month, unsigned day);

/// Parses `YYYY-MM-DD`. Returns nullopt on any syntax or calendar error.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_date(Date d);

/// Parses the 14-digit `YYYYMMDDHHMMSS` UTC stamp used by GKG files.
std::optional<Timestamp> parse_compact_timestamp(std::string_view text);
std::string format_compact_timestamp(Timestamp ts);

/// Parses a local clock time `HH:MM` into minutes after midnight.
std::optional<int> parse_clock_minutes(std::string_view text);
std::string format_clock_minutes(int minutes);

int year_of(Date d);
bool is_weekend(Date d);

} // namespace emospread
