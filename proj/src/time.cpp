#include "trollmap/time.hpp"

#include <charconv>
#include <cstdio>

namespace trollmap {

namespace {

using namespace std::chrono;

bool read_uint(std::string_view text, std::size_t pos, std::size_t width, unsigned& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc{} && ptr == text.data() + pos + width;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.remove_suffix(1);

  unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_uint(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_uint(text, 5, 2, mo) || text[7] != '-' || !read_uint(text, 8, 2, d)) {
    return std::nullopt;
  }
  if (text.size() > 10) {
    if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
    if (text.size() < 16 || !read_uint(text, 11, 2, h) || text[13] != ':' ||
        !read_uint(text, 14, 2, mi)) {
      return std::nullopt;
    }
    if (text.size() > 16) {
      if (text.size() != 19 || text[16] != ':' || !read_uint(text, 17, 2, s)) return std::nullopt;
    }
  }
  const year_month_day ymd{year{static_cast<int>(y)}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return time_point_cast<minutes>(sys_days{ymd}) + hours{h} + minutes{mi};
}

std::string format_timestamp(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<minutes> tod{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02ld:%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()));
  return buf;
}

std::string format_date(Timestamp t) {
  const year_month_day ymd{floor<days>(t)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp make_timestamp(int y, unsigned mo, unsigned d, unsigned h, unsigned mi) {
  return time_point_cast<minutes>(sys_days{year{y} / month{mo} / day{d}}) + hours{h} + minutes{mi};
}

Timestamp add_months(Timestamp t, int months) {
  const auto day_point = floor<days>(t);
  const auto tod = t - day_point;
  year_month_day ymd{day_point};
  ymd += std::chrono::months{months};
  return time_point_cast<minutes>(sys_days{ymd}) + tod;
}

bool is_month_aligned(Timestamp t) {
  const auto day_point = floor<days>(t);
  return t == day_point && year_month_day{day_point}.day() == day{1};
}

}  // namespace trollmap
