#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flowseg/calendar.hpp"
#include "flowseg/changepoint.hpp"
#include "flowseg/error.hpp"
#include "flowseg/series.hpp"

namespace flowseg {

enum class TrendSign { Positive, Negative };

inline std::string to_string(TrendSign s) {
  return s == TrendSign::Positive ? "positive" : "negative";
}

struct TrendConfig {
  std::size_t window = 25;

  void validate(std::size_t n) const {
    if (window < 2) throw config_error("trend window must be >= 2");
    if (window > n) throw config_error("trend window longer than the series");
  }
};

struct SignedChangepoint {
  std::size_t position = 0;  // 1-based index into the series
  CalendarDate date;
  TrendSign sign = TrendSign::Negative;
};

// Trailing simple moving average, 1-based like changepoint positions:
// ma[t] = mean(y[t-window+1 .. t]) once t >= window, and the expanding mean
// of y[1..t] during the warm-up. A trailing window never mixes observations
// from after a changepoint into values before it.
inline std::vector<double> moving_average(const std::vector<double>& y,
                                          std::size_t window) {
  TrendConfig{window}.validate(y.size());
  std::vector<double> ma(y.size() + 1, 0.0);  // ma[0] unused
  double rolling = 0.0;
  for (std::size_t t = 1; t <= y.size(); ++t) {
    rolling += y[t - 1];
    if (t > window) rolling -= y[t - 1 - window];
    ma[t] = rolling / static_cast<double>(t < window ? t : window);
  }
  return ma;
}

inline std::vector<double> moving_average(const DailySeries& series,
                                          std::size_t window) {
  return moving_average(series.values(), window);
}

// Signs each changepoint by the post-changepoint trend: the moving average
// one window after tau (clamped to the end of the series) against the moving
// average at tau. Ties count as Negative; appreciation must be strict.
inline std::vector<SignedChangepoint> classify_signs(const DailySeries& series,
                                                     const Segmentation& seg,
                                                     const TrendConfig& cfg = {}) {
  const std::size_t n = series.size();
  cfg.validate(n);
  const std::vector<double> ma = moving_average(series.values(), cfg.window);
  std::vector<SignedChangepoint> out;
  out.reserve(seg.changepoints.size());
  for (std::size_t tau : seg.changepoints) {
    if (tau < 1 || tau >= n) throw data_error("changepoint position out of range");
    const std::size_t horizon = std::min(tau + cfg.window, n);
    SignedChangepoint cp;
    cp.position = tau;
    cp.date = series.dates()[tau - 1];
    cp.sign = ma[horizon] > ma[tau] ? TrendSign::Positive : TrendSign::Negative;
    out.push_back(cp);
  }
  return out;
}

}  // namespace flowseg
