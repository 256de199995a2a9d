#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "flowseg/error.hpp"

namespace flowseg {

// Proleptic Gregorian calendar date. Immutable after construction and
// validated on construction, so a CalendarDate always names a real day.
struct CalendarDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  CalendarDate() = default;
  CalendarDate(int y, int m, int d) : year(y), month(m), day(d) {
    if (!valid(y, m, d)) {
      throw data_error("invalid calendar date " + format(y, m, d));
    }
  }

  static bool leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static int days_in_month(int y, int m) {
    static const int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return 0;
    if (m == 2 && leap_year(y)) return 29;
    return kDays[m - 1];
  }

  static bool valid(int y, int m, int d) {
    return m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
  }

  auto operator<=>(const CalendarDate&) const = default;

  std::string to_string() const { return format(year, month, day); }

 private:
  static std::string format(int y, int m, int d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
  }
};

// Parses strict ISO-8601 YYYY-MM-DD.
inline CalendarDate parse_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &extra) != 3 ||
      s.size() != 10) {
    throw parse_error("malformed date '" + s + "', expected YYYY-MM-DD");
  }
  if (!CalendarDate::valid(y, m, d)) {
    throw parse_error("invalid calendar date '" + s + "'");
  }
  return CalendarDate(y, m, d);
}

// Calendar quarter. Stored as an integer pair, never as a date; the episode
// join only needs quarter resolution.
struct Quarter {
  int year = 1970;
  int q = 1;

  Quarter() = default;
  Quarter(int y, int qq) : year(y), q(qq) {
    if (qq < 1 || qq > 4) {
      throw data_error("quarter index out of range: " + std::to_string(qq));
    }
  }

  auto operator<=>(const Quarter&) const = default;

  // Linear index; makes succ/pred and spans trivial across year boundaries.
  long index() const { return 4L * year + (q - 1); }

  Quarter succ() const { return q == 4 ? Quarter(year + 1, 1) : Quarter(year, q + 1); }
  Quarter pred() const { return q == 1 ? Quarter(year - 1, 4) : Quarter(year, q - 1); }

  std::string to_string() const {
    return std::to_string(year) + "Q" + std::to_string(q);
  }
};

// "2006Q1" -> Quarter{2006, 1}.
inline Quarter parse_quarter(const std::string& s) {
  int y = 0, q = 0;
  char sep = 0, extra = 0;
  if (std::sscanf(s.c_str(), "%d%c%1d%c", &y, &sep, &q, &extra) != 3 ||
      (sep != 'Q' && sep != 'q') || q < 1 || q > 4) {
    throw parse_error("malformed quarter '" + s + "', expected YYYYQn");
  }
  return Quarter(y, q);
}

inline Quarter date_to_quarter(const CalendarDate& d) {
  return Quarter(d.year, (d.month + 2) / 3);
}

// Inclusive quarter count of [a, b].
inline long quarter_span(const Quarter& a, const Quarter& b) {
  if (b < a) {
    throw data_error("quarter_span: " + a.to_string() + " > " + b.to_string());
  }
  return b.index() - a.index() + 1;
}

}  // namespace flowseg
