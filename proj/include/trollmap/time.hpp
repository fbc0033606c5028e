#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace trollmap {

// Tweet timestamps carry minute precision in the source dumps.
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM", "YYYY-MM-DD HH:MM:SS" and the
// ISO-8601 'T' separator with optional trailing 'Z'. Seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// "YYYY-MM-DD HH:MM", the format the tweet dumps use.
std::string format_timestamp(Timestamp t);

// "YYYY-MM-DD" of the timestamp's day.
std::string format_date(Timestamp t);

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0);

// Adds calendar months, keeping the day-of-month (callers pass month-aligned values).
Timestamp add_months(Timestamp t, int months);

bool is_month_aligned(Timestamp t);

}  // namespace trollmap
