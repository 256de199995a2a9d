#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "flowseg/episodes.hpp"
#include "flowseg/error.hpp"
#include "flowseg/rng.hpp"

namespace flowseg {

struct KMeansConfig {
  int k = 3;
  int max_sweeps = 100;
  int restarts = 10;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (k < 2) throw config_error("k must be >= 2");
    if (max_sweeps < 1) throw config_error("max_sweeps must be >= 1");
    if (restarts < 1) throw config_error("restarts must be >= 1");
  }
};

struct KMeansResult {
  std::vector<int> assignments;        // per observation, 0..k-1
  std::vector<double> centroids;       // cluster means
  double within_ss = 0.0;              // total within-cluster sum of squares
  int sweeps_used = 0;
  std::vector<double> sweep_within_ss; // objective after each sweep of the winning run
};

namespace detail {

inline double recompute_within_ss(const std::vector<double>& x,
                                  const std::vector<int>& assign, int k,
                                  std::vector<double>* centroids_out = nullptr) {
  std::vector<double> sum(k, 0.0);
  std::vector<long> cnt(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum[assign[i]] += x[i];
    cnt[assign[i]] += 1;
  }
  std::vector<double> mu(k, 0.0);
  for (int c = 0; c < k; ++c) {
    assert(cnt[c] > 0);
    mu[c] = sum[c] / static_cast<double>(cnt[c]);
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu[assign[i]];
    ss += d * d;
  }
  if (centroids_out) *centroids_out = mu;
  return ss;
}

// One full Hartigan-Wong run from the given seed centroids.
inline KMeansResult hartigan_wong_run(const std::vector<double>& x,
                                      std::vector<double> mu,
                                      const KMeansConfig& cfg) {
  const int k = cfg.k;
  const std::size_t n = x.size();
  std::vector<int> assign(n, 0);
  std::vector<long> cnt(k, 0);
  std::vector<double> sum(k, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = std::abs(x[i] - mu[c]);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    assign[i] = best;
    cnt[best] += 1;
    sum[best] += x[i];
  }
  // Seeds are data values, so every cluster captured at least the point(s)
  // equal to its seed; an empty cluster here means the seeding was broken.
  for (int c = 0; c < k; ++c) {
    if (cnt[c] == 0) throw data_error("k-means: empty cluster after seeding");
    mu[c] = sum[c] / static_cast<double>(cnt[c]);
  }

  KMeansResult res;
  res.sweep_within_ss.reserve(8);
  int sweep = 0;
  for (; sweep < cfg.max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = assign[i];
      if (cnt[a] == 1) continue;  // singletons never donate
      const double na = static_cast<double>(cnt[a]);
      const double da = x[i] - mu[a];
      const double removal_gain = na * da * da / (na - 1.0);
      int b = -1;
      double insertion_cost = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (c == a) continue;
        const double nc = static_cast<double>(cnt[c]);
        const double dc = x[i] - mu[c];
        const double cost = nc * dc * dc / (nc + 1.0);
        if (cost < insertion_cost) {
          insertion_cost = cost;
          b = c;
        }
      }
      if (removal_gain > insertion_cost) {
        sum[a] -= x[i];
        cnt[a] -= 1;
        mu[a] = sum[a] / static_cast<double>(cnt[a]);
        sum[b] += x[i];
        cnt[b] += 1;
        mu[b] = sum[b] / static_cast<double>(cnt[b]);
        assign[i] = b;
        moved = true;
        assert(cnt[a] > 0);
      }
    }
    res.sweep_within_ss.push_back(recompute_within_ss(x, assign, k));
    if (!moved) break;
  }
  res.sweeps_used = std::min(sweep + 1, cfg.max_sweeps);
  res.assignments = std::move(assign);
  res.within_ss = recompute_within_ss(x, res.assignments, k, &res.centroids);
  return res;
}

// Deterministic restart-0 seeds: the data values nearest the
// 1/(2k), 3/(2k), ... quantiles, kept distinct.
inline std::vector<double> quantile_seeds(const std::vector<double>& x, int k) {
  std::vector<double> seeds;
  std::set<double> used;
  for (int j = 0; j < k; ++j) {
    const double target =
        percentile(x, (2.0 * j + 1.0) / (2.0 * k));
    double best = 0.0;
    double bd = std::numeric_limits<double>::infinity();
    for (double v : x) {
      if (used.count(v)) continue;
      const double d = std::abs(v - target);
      if (d < bd) {
        bd = d;
        best = v;
      }
    }
    seeds.push_back(best);
    used.insert(best);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

}  // namespace detail

// Best-of-restarts Hartigan-Wong in one dimension. Restart 0 uses the
// deterministic quantile seeding; later restarts sample k distinct values
// with the seeded generator.
inline KMeansResult kmeans_hartigan_wong(const std::vector<double>& values,
                                         const KMeansConfig& cfg = {}) {
  cfg.validate();
  std::set<double> distinct;
  for (double v : values) {
    if (!std::isfinite(v)) throw data_error("k-means: non-finite value");
    distinct.insert(v);
  }
  if (static_cast<int>(distinct.size()) < cfg.k) {
    throw data_error("k-means: need at least k distinct values");
  }

  std::mt19937_64 eng(cfg.rng_seed);
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<double> seeds;
    if (r == 0) {
      seeds = detail::quantile_seeds(values, cfg.k);
    } else {
      std::set<double> chosen;
      while (static_cast<int>(chosen.size()) < cfg.k) {
        chosen.insert(values[uniform_index(eng, values.size())]);
      }
      seeds.assign(chosen.begin(), chosen.end());
    }
    KMeansResult res = detail::hartigan_wong_run(values, seeds, cfg);
    if (!have || res.within_ss < best.within_ss) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

// Globally optimal 1-D k-means by dynamic programming over contiguous
// partitions of the sorted values. O(k n^2).
inline KMeansResult kmeans_exact_1d(const std::vector<double>& values, int k) {
  if (values.size() > 5000) {
    throw config_error("kmeans_exact_1d: input larger than 5000 points");
  }
  if (k < 1) throw config_error("k must be >= 1");
  std::set<double> distinct;
  for (double v : values) {
    if (!std::isfinite(v)) throw data_error("k-means: non-finite value");
    distinct.insert(v);
  }
  if (static_cast<int>(distinct.size()) < k) {
    throw data_error("k-means: need at least k distinct values");
  }

  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> s(n), pre(n + 1, 0.0), pre2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) s[i] = values[order[i]];
  for (std::size_t i = 0; i < n; ++i) {
    pre[i + 1] = pre[i] + s[i];
    pre2[i + 1] = pre2[i] + s[i] * s[i];
  }
  auto seg_ss = [&](std::size_t a, std::size_t b) {  // inclusive, 0-based
    const double m = static_cast<double>(b - a + 1);
    const double su = pre[b + 1] - pre[a];
    return std::max(0.0, (pre2[b + 1] - pre2[a]) - su * su / m);
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(k + 1, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> from(k + 1, std::vector<std::size_t>(n + 1, 0));
  D[0][0] = 0.0;
  for (int j = 1; j <= k; ++j) {
    for (std::size_t i = static_cast<std::size_t>(j); i <= n; ++i) {
      for (std::size_t m = static_cast<std::size_t>(j - 1); m < i; ++m) {
        if (D[j - 1][m] == inf) continue;
        const double cand = D[j - 1][m] + seg_ss(m, i - 1);
        if (cand < D[j][i]) {
          D[j][i] = cand;
          from[j][i] = m;
        }
      }
    }
  }

  KMeansResult res;
  res.assignments.assign(n, 0);
  res.within_ss = D[k][n];
  std::size_t hi = n;
  for (int j = k; j >= 1; --j) {
    const std::size_t lo = from[j][hi];
    for (std::size_t r = lo; r < hi; ++r) res.assignments[order[r]] = j - 1;
    hi = lo;
  }
  res.within_ss = detail::recompute_within_ss(values, res.assignments, k, &res.centroids);
  res.sweeps_used = 0;
  return res;
}

// Maps the three clusters to flow labels by centroid order: highest mean is
// Surge, lowest is Outflow, the middle one is Normal.
inline std::vector<FlowLabel> label_by_cluster_mean(const KMeansResult& result) {
  if (result.centroids.size() != 3) {
    throw config_error("label_by_cluster_mean needs exactly three clusters");
  }
  const std::vector<double>& mu = result.centroids;
  if (mu[0] == mu[1] || mu[0] == mu[2] || mu[1] == mu[2]) {
    throw data_error("degenerate clustering: tied centroids");
  }
  std::vector<int> idx = {0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return mu[a] < mu[b]; });
  std::vector<FlowLabel> by_cluster(3, FlowLabel::Normal);
  by_cluster[idx[0]] = FlowLabel::Outflow;
  by_cluster[idx[2]] = FlowLabel::Surge;
  std::vector<FlowLabel> labels;
  labels.reserve(result.assignments.size());
  for (int a : result.assignments) labels.push_back(by_cluster[a]);
  return labels;
}

}  // namespace flowseg
