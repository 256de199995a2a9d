#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flowseg/calendar.hpp"
#include "flowseg/error.hpp"
#include "flowseg/series.hpp"

namespace flowseg {

enum class FlowLabel { Surge, Normal, Outflow };

inline std::string to_string(FlowLabel l) {
  switch (l) {
    case FlowLabel::Surge: return "surge";
    case FlowLabel::Normal: return "normal";
    case FlowLabel::Outflow: return "outflow";
  }
  return "?";
}

inline FlowLabel flow_label_from_string(const std::string& s) {
  if (s == "surge") return FlowLabel::Surge;
  if (s == "normal") return FlowLabel::Normal;
  if (s == "outflow") return FlowLabel::Outflow;
  throw parse_error("unknown flow label '" + s + "'");
}

// A maximal run of at least two consecutive extreme quarters.
struct Episode {
  FlowLabel kind = FlowLabel::Surge;  // never Normal
  Quarter start;
  Quarter end;

  long quarters() const { return quarter_span(start, end); }

  bool contains(const Quarter& q) const { return !(q < start) && !(end < q); }

  bool operator==(const Episode&) const = default;
};

struct ThresholdConfig {
  double percentile = 0.30;  // fraction in (0, 0.5)

  void validate() const {
    if (!(percentile > 0.0 && percentile < 0.5)) {
      throw config_error("threshold percentile must lie in (0, 0.5)");
    }
  }
};

// Linear-interpolation quantile: h = (n-1)*p on the sorted values,
// result = v[floor(h)] + frac(h) * (v[ceil(h)] - v[floor(h)]).
inline double percentile(const std::vector<double>& values, double p) {
  if (values.empty()) throw data_error("percentile of empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw config_error("percentile fraction outside [0,1]");
  for (double v : values) {
    if (!std::isfinite(v)) throw data_error("percentile: non-finite value");
  }
  std::vector<double> s(values);
  std::sort(s.begin(), s.end());
  const double h = static_cast<double>(s.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// Top/bottom percentile labeling over the country's own full sample.
// Comparisons are strict, so values tied with a threshold stay Normal;
// in particular an all-equal series is labeled all Normal.
inline std::vector<FlowLabel> label_by_threshold(const QuarterlySeries& series,
                                                 const ThresholdConfig& cfg = {}) {
  cfg.validate();
  if (series.size() < 4) {
    throw data_error("threshold labeling needs at least four quarters");
  }
  const std::vector<double>& v = series.values();
  const double upper = percentile(v, 1.0 - cfg.percentile);
  const double lower = percentile(v, cfg.percentile);
  std::vector<FlowLabel> labels(v.size(), FlowLabel::Normal);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > upper) {
      labels[i] = FlowLabel::Surge;
    } else if (v[i] < lower) {
      labels[i] = FlowLabel::Outflow;
    }
  }
  return labels;
}

// Maximal runs of identical Surge/Outflow labels of length >= min_run become
// episodes; shorter runs are dropped, Normal never forms an episode.
inline std::vector<Episode> extract_episodes(const std::vector<FlowLabel>& labels,
                                             const Quarter& first_quarter,
                                             long min_run = 2) {
  if (min_run < 1) throw config_error("min_run must be >= 1");
  std::vector<Episode> out;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == FlowLabel::Normal) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1] == labels[i]) ++j;
    if (static_cast<long>(j - i + 1) >= min_run) {
      long base = first_quarter.index();
      auto at = [&](std::size_t k) {
        long idx = base + static_cast<long>(k);
        return Quarter(static_cast<int>(idx / 4), static_cast<int>(idx % 4) + 1);
      };
      out.push_back(Episode{labels[i], at(i), at(j)});
    }
    i = j + 1;
  }
  return out;
}

inline std::vector<Episode> extract_episodes(const std::vector<FlowLabel>& labels,
                                             const QuarterlySeries& series,
                                             long min_run = 2) {
  if (labels.size() != series.size()) {
    throw data_error("labels not aligned with quarterly series");
  }
  return extract_episodes(labels, series.start(), min_run);
}

// Inverse of extract_episodes: episode quarters get their kind, all other
// quarters are Normal. Episodes must be disjoint and lie inside the range.
inline std::vector<FlowLabel> labels_from_episodes(const std::vector<Episode>& episodes,
                                                   const Quarter& first,
                                                   std::size_t n_quarters) {
  std::vector<FlowLabel> labels(n_quarters, FlowLabel::Normal);
  const long base = first.index();
  for (const Episode& e : episodes) {
    long a = e.start.index() - base;
    long b = e.end.index() - base;
    if (a < 0 || b >= static_cast<long>(n_quarters)) {
      throw data_error("episode outside label range: " + e.start.to_string() +
                       "-" + e.end.to_string());
    }
    for (long k = a; k <= b; ++k) {
      if (labels[static_cast<std::size_t>(k)] != FlowLabel::Normal) {
        throw data_error("overlapping episodes at " + e.start.to_string());
      }
      labels[static_cast<std::size_t>(k)] = e.kind;
    }
  }
  return labels;
}

}  // namespace flowseg
