#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flowseg/calendar.hpp"
#include "flowseg/error.hpp"
#include "flowseg/series.hpp"

namespace flowseg {

namespace csv {

// Comma splitter with minimal double-quote support ("a,b" stays one field).
inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

inline std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                       const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw parse_error(path + ": expected header '" + expected_header + "', got '" +
                      line + "'", 1);
  }
  std::vector<std::vector<std::string>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split(line));
    rows.back().push_back(std::to_string(lineno));  // carry the line number last
  }
  return rows;
}

inline double to_double(const std::string& s, long line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    if (!std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw parse_error("bad numeric field '" + s + "'", line);
  }
}

}  // namespace csv

// Reads `country,quarter,net_flow_pct_gdp` with quarters as YYYYQn.
// Per-country series must be contiguous; duplicates and gaps are rejected
// with the offending line numbers.
inline std::map<std::string, QuarterlySeries> load_flows(const std::string& path) {
  auto rows = csv::read_rows(path, "country,quarter,net_flow_pct_gdp");
  struct Pt {
    Quarter q;
    double v;
    long line;
  };
  std::map<std::string, std::vector<Pt>> by_country;
  for (const auto& r : rows) {
    const long line = std::stol(r.back());
    if (r.size() != 4) throw parse_error("expected 3 fields", line);
    Quarter q = [&] {
      try {
        return parse_quarter(r[1]);
      } catch (const error& e) {
        throw parse_error(std::string(e.what()), line);
      }
    }();
    by_country[r[0]].push_back({q, csv::to_double(r[2], line), line});
  }
  std::map<std::string, QuarterlySeries> out;
  for (auto& [country, pts] : by_country) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].q == pts[i - 1].q) {
        throw parse_error("duplicate (" + country + ", " + pts[i].q.to_string() +
                              ") first seen on line " + std::to_string(pts[i - 1].line),
                          pts[i].line);
      }
      if (pts[i].q != pts[i - 1].q.succ()) {
        throw parse_error("gap or disorder in " + country + " between " +
                              pts[i - 1].q.to_string() + " and " + pts[i].q.to_string(),
                          pts[i].line);
      }
    }
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const Pt& p : pts) vals.push_back(p.v);
    if (vals.empty()) continue;
    out.emplace(country, QuarterlySeries(pts.front().q, std::move(vals)));
  }
  return out;
}

// Reads `country,date,close` with ISO dates, strictly increasing per country,
// closes positive.
inline std::map<std::string, DailySeries> load_index(const std::string& path) {
  auto rows = csv::read_rows(path, "country,date,close");
  struct Pt {
    CalendarDate d;
    double v;
  };
  std::map<std::string, std::vector<Pt>> by_country;
  std::map<std::string, long> last_line;
  for (const auto& r : rows) {
    const long line = std::stol(r.back());
    if (r.size() != 4) throw parse_error("expected 3 fields", line);
    CalendarDate d = [&] {
      try {
        return parse_date(r[1]);
      } catch (const error& e) {
        throw parse_error(std::string(e.what()), line);
      }
    }();
    const double close = csv::to_double(r[2], line);
    if (close <= 0.0) throw parse_error("non-positive close for " + r[0], line);
    auto& pts = by_country[r[0]];
    if (!pts.empty() && !(pts.back().d < d)) {
      throw parse_error("out-of-order date for " + r[0] + ": " +
                            pts.back().d.to_string() + " then " + d.to_string(),
                        line);
    }
    pts.push_back({d, close});
    last_line[r[0]] = line;
  }
  std::map<std::string, DailySeries> out;
  for (auto& [country, pts] : by_country) {
    if (pts.size() < 2) {
      throw parse_error(country + " has fewer than two index points",
                        last_line[country]);
    }
    std::vector<CalendarDate> dates;
    std::vector<double> vals;
    dates.reserve(pts.size());
    vals.reserve(pts.size());
    for (const Pt& p : pts) {
      dates.push_back(p.d);
      vals.push_back(p.v);
    }
    out.emplace(country, DailySeries(std::move(dates), std::move(vals)));
  }
  return out;
}

}  // namespace flowseg
