#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flowseg/calendar.hpp"
#include "flowseg/error.hpp"

namespace flowseg {

// Daily index levels. Dates strictly increasing, values finite and positive,
// at least two points. Gaps (weekends, holidays) are allowed.
class DailySeries {
 public:
  DailySeries(std::vector<CalendarDate> dates, std::vector<double> values)
      : dates_(std::move(dates)), values_(std::move(values)) {
    if (dates_.size() != values_.size()) {
      throw data_error("daily series: dates/values length mismatch");
    }
    if (dates_.size() < 2) {
      throw data_error("daily series needs at least two points");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
        throw data_error("daily series: non-positive or non-finite value at " +
                         dates_[i].to_string());
      }
      if (i > 0 && !(dates_[i - 1] < dates_[i])) {
        throw data_error("daily series: dates not strictly increasing at " +
                         dates_[i].to_string());
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<CalendarDate>& dates() const { return dates_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<CalendarDate> dates_;
  std::vector<double> values_;
};

// Quarterly net capital flows in percent of GDP. Contiguity is structural:
// only the first quarter is stored, so gaps cannot be represented.
class QuarterlySeries {
 public:
  QuarterlySeries(Quarter start, std::vector<double> values)
      : start_(start), values_(std::move(values)) {
    if (values_.empty()) throw data_error("quarterly series is empty");
    for (double v : values_) {
      if (!std::isfinite(v)) throw data_error("quarterly series: non-finite value");
    }
  }

  // Builds from explicit (quarter, value) points, rejecting duplicates and gaps.
  static QuarterlySeries from_points(const std::vector<std::pair<Quarter, double>>& pts) {
    if (pts.empty()) throw data_error("quarterly series is empty");
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) {
        if (pts[i].first == pts[i - 1].first) {
          throw data_error("duplicate quarter " + pts[i].first.to_string());
        }
        if (pts[i].first != pts[i - 1].first.succ()) {
          throw data_error("gap in quarterly series between " +
                           pts[i - 1].first.to_string() + " and " +
                           pts[i].first.to_string());
        }
      }
      vals.push_back(pts[i].second);
    }
    return QuarterlySeries(pts.front().first, std::move(vals));
  }

  std::size_t size() const { return values_.size(); }
  Quarter start() const { return start_; }
  Quarter end() const { return quarter_at(values_.size() - 1); }
  Quarter quarter_at(std::size_t i) const {
    long idx = start_.index() + static_cast<long>(i);
    return Quarter(static_cast<int>(idx / 4), static_cast<int>(idx % 4) + 1);
  }
  const std::vector<double>& values() const { return values_; }

 private:
  Quarter start_;
  std::vector<double> values_;
};

// One country's inputs for a pipeline run.
struct CountryDataset {
  std::string country;
  QuarterlySeries flows;
  DailySeries index;
};

}  // namespace flowseg
