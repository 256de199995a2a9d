#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "flowseg/error.hpp"
#include "flowseg/series.hpp"

namespace flowseg {

enum class CostKind { MeanChange, VarianceChange, MeanVarianceChange };

inline std::string to_string(CostKind c) {
  switch (c) {
    case CostKind::MeanChange: return "mean";
    case CostKind::VarianceChange: return "variance";
    case CostKind::MeanVarianceChange: return "meanvar";
  }
  return "?";
}

inline CostKind cost_kind_from_string(const std::string& s) {
  if (s == "mean") return CostKind::MeanChange;
  if (s == "variance") return CostKind::VarianceChange;
  if (s == "meanvar") return CostKind::MeanVarianceChange;
  throw parse_error("unknown cost kind '" + s + "'");
}

// Free parameters per segment under each cost.
inline int cost_parameter_count(CostKind c) {
  return c == CostKind::MeanVarianceChange ? 2 : 1;
}

inline int min_segment_len_for(CostKind c) {
  return c == CostKind::MeanChange ? 1 : 2;
}

struct PeltConfig {
  CostKind cost = CostKind::VarianceChange;
  double penalty = 0.0;       // per changepoint, >= 0
  int min_segment_len = 0;    // 0 -> cost-specific default

  int effective_min_segment_len() const {
    return min_segment_len > 0 ? min_segment_len : min_segment_len_for(cost);
  }

  void validate() const {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
      throw config_error("penalty must be finite and >= 0");
    }
    if (effective_min_segment_len() < min_segment_len_for(cost)) {
      throw config_error("min_segment_len too small for the cost kind");
    }
  }
};

// BIC-style default: one log(n) per free segment parameter.
inline double default_penalty(CostKind cost, std::size_t n) {
  if (n < 2) throw config_error("default_penalty needs n >= 2");
  return cost_parameter_count(cost) * std::log(static_cast<double>(n));
}

// Changepoint positions are 1-based: tau in [1, n-1] ends a segment, so the
// segments are y[1..tau_1], y[tau_1+1..tau_2], ..., y[tau_m+1..n].
struct Segmentation {
  std::vector<std::size_t> changepoints;
  double total_cost = 0.0;
};

// Prefix sums of y and y^2; gives O(1) segment statistics.
class CumulativeStats {
 public:
  explicit CumulativeStats(const std::vector<double>& y)
      : sum_(y.size() + 1, 0.0), sum2_(y.size() + 1, 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) throw data_error("non-finite value in series");
      sum_[i + 1] = sum_[i] + y[i];
      sum2_[i + 1] = sum2_[i] + y[i] * y[i];
    }
  }

  std::size_t n() const { return sum_.size() - 1; }

  // Sums over the 1-based inclusive range [s, e].
  double sum(std::size_t s, std::size_t e) const { return sum_[e] - sum_[s - 1]; }
  double sum2(std::size_t s, std::size_t e) const { return sum2_[e] - sum2_[s - 1]; }

 private:
  std::vector<double> sum_, sum2_;
};

namespace detail {

constexpr double kVarFloor = 1e-12;  // keeps log(var) finite on flat segments
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

inline double segment_rss(const CumulativeStats& stats, std::size_t s, std::size_t e) {
  const double len = static_cast<double>(e - s + 1);
  const double su = stats.sum(s, e);
  return std::max(0.0, stats.sum2(s, e) - su * su / len);
}

}  // namespace detail

// Residual sum of squares around the segment mean, over 1-based [s, e].
inline double segment_rss(const CumulativeStats& stats, std::size_t s, std::size_t e) {
  if (s < 1 || e > stats.n() || s > e) throw data_error("segment range out of bounds");
  return detail::segment_rss(stats, s, e);
}

// Twice the negative maximized Gaussian log-likelihood of segment [s, e]
// (1-based, inclusive). Constants are kept so values are comparable across
// cost kinds.
//
//   MeanChange:     len*log(2*pi*global_var) + rss/global_var
//                   (fixed-variance model; global_var is the MLE variance of
//                   the whole series, supplied by the caller)
//   VarianceChange / MeanVarianceChange:
//                   len*(log(2*pi) + log(rss/len) + 1)
//                   with the segment variance floored at 1e-12.
//
// The two variance-bearing kinds share the formula; they differ in the
// per-segment parameter count used by default_penalty.
inline double segment_cost(const CumulativeStats& stats, std::size_t s, std::size_t e,
                           CostKind cost, double global_var = 1.0) {
  if (s < 1 || e > stats.n() || s > e) throw data_error("segment range out of bounds");
  const double len = static_cast<double>(e - s + 1);
  if (static_cast<int>(e - s + 1) < min_segment_len_for(cost)) {
    throw data_error("segment shorter than the cost kind allows");
  }
  const double rss = detail::segment_rss(stats, s, e);
  if (cost == CostKind::MeanChange) {
    const double v = std::max(global_var, detail::kVarFloor);
    return len * (detail::kLog2Pi + std::log(v)) + rss / v;
  }
  const double var_hat = std::max(rss / len, detail::kVarFloor);
  return len * (detail::kLog2Pi + std::log(var_hat) + 1.0);
}

// MLE (divide-by-n) variance of the full series; the fixed variance of the
// MeanChange model.
inline double series_variance(const std::vector<double>& y) {
  CumulativeStats stats(y);
  if (y.empty()) throw data_error("variance of empty series");
  return detail::segment_rss(stats, 1, y.size()) / static_cast<double>(y.size());
}

namespace detail {

struct Solver {
  const CumulativeStats& stats;
  CostKind cost;
  double global_var;

  double operator()(std::size_t s, std::size_t e) const {
    const double len = static_cast<double>(e - s + 1);
    const double rss = segment_rss(stats, s, e);
    if (cost == CostKind::MeanChange) {
      const double v = std::max(global_var, kVarFloor);
      return len * (kLog2Pi + std::log(v)) + rss / v;
    }
    const double var_hat = std::max(rss / len, kVarFloor);
    return len * (kLog2Pi + std::log(var_hat) + 1.0);
  }
};

inline Segmentation backtrack(const std::vector<std::size_t>& prev, std::size_t n,
                              double fn) {
  Segmentation seg;
  seg.total_cost = fn;
  std::size_t t = n;
  while (t > 0) {
    const std::size_t p = prev[t];
    if (p > 0) seg.changepoints.push_back(p);
    t = p;
  }
  std::reverse(seg.changepoints.begin(), seg.changepoints.end());
  return seg;
}

// Shared dynamic program. With pruning enabled this is PELT: a candidate tau
// is dropped once F(tau) + C(y[tau+1..t]) > F(t), valid for these costs with
// pruning constant K = 0. Without pruning it is the plain O(n^2) optimal
// partitioning recursion.
inline Segmentation penalized_dp(const std::vector<double>& y, const PeltConfig& cfg,
                                 bool prune) {
  cfg.validate();
  const std::size_t n = y.size();
  const std::size_t minlen = static_cast<std::size_t>(cfg.effective_min_segment_len());
  if (n < minlen) throw data_error("series shorter than one minimal segment");
  CumulativeStats stats(y);
  const Solver C{stats, cfg.cost,
                 cfg.cost == CostKind::MeanChange ? series_variance(y) : 1.0};

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> F(n + 1, inf);
  std::vector<std::size_t> prev(n + 1, 0);
  F[0] = -cfg.penalty;  // the first segment carries no penalty

  std::vector<std::size_t> candidates{0};
  std::vector<std::size_t> keep;
  for (std::size_t t = minlen; t <= n; ++t) {
    double best = inf;
    std::size_t best_tau = 0;
    for (std::size_t tau : candidates) {
      if (t - tau < minlen) continue;
      const double total = F[tau] + C(tau + 1, t) + cfg.penalty;
      if (total < best) {
        best = total;
        best_tau = tau;
      }
    }
    if (best == inf) continue;  // no admissible split yet
    F[t] = best;
    prev[t] = best_tau;

    if (prune) {
      keep.clear();
      for (std::size_t tau : candidates) {
        if (t - tau < minlen) {
          keep.push_back(tau);  // not yet evaluable, cannot be pruned
        } else if (F[tau] + C(tau + 1, t) <= F[t]) {
          keep.push_back(tau);
        }
      }
      candidates.swap(keep);
    }
    if (t + minlen <= n || t == n) candidates.push_back(t);
  }
  return backtrack(prev, n, F[n]);
}

}  // namespace detail

// Exact minimizer of the penalized segmentation objective
//   sum_i C(segment_i) + m * penalty
// via the pruned recursion. A series too short for two minimal segments
// returns the empty segmentation with the whole-series cost.
inline Segmentation pelt(const std::vector<double>& y, const PeltConfig& cfg) {
  return detail::penalized_dp(y, cfg, true);
}

inline Segmentation pelt(const DailySeries& series, const PeltConfig& cfg) {
  return pelt(series.values(), cfg);
}

// Unpruned O(n^2) optimal partitioning; the oracle PELT is checked against.
inline Segmentation optimal_partition_oracle(const std::vector<double>& y,
                                             const PeltConfig& cfg) {
  if (y.size() > 10000) {
    throw config_error("optimal_partition_oracle: series larger than 10000");
  }
  return detail::penalized_dp(y, cfg, false);
}

inline Segmentation optimal_partition_oracle(const DailySeries& series,
                                             const PeltConfig& cfg) {
  return optimal_partition_oracle(series.values(), cfg);
}

// Recomputes sum of segment costs + m*penalty from the changepoint list.
// Cross-checks the Segmentation invariant in tests and reports.
inline double segmentation_cost(const std::vector<double>& y, const PeltConfig& cfg,
                                const std::vector<std::size_t>& changepoints) {
  CumulativeStats stats(y);
  const detail::Solver C{stats, cfg.cost,
                         cfg.cost == CostKind::MeanChange ? series_variance(y) : 1.0};
  double total = 0.0;
  std::size_t start = 1;
  for (std::size_t tau : changepoints) {
    total += C(start, tau) + cfg.penalty;
    start = tau + 1;
  }
  total += C(start, y.size());
  return total;
}

}  // namespace flowseg
