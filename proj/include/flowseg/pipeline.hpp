#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowseg/changepoint.hpp"
#include "flowseg/clustering.hpp"
#include "flowseg/episodes.hpp"
#include "flowseg/error.hpp"
#include "flowseg/join.hpp"
#include "flowseg/series.hpp"
#include "flowseg/svg.hpp"
#include "flowseg/trend.hpp"
#include "flowseg/volatility.hpp"

namespace flowseg {

inline constexpr const char* kVersion = "1.0.0";

enum class Approach { Threshold, Clustering };

inline std::string to_string(Approach a) {
  return a == Approach::Threshold ? "threshold" : "clustering";
}

struct RunConfig {
  bool run_threshold = true;
  bool run_clustering = true;
  PeltConfig pelt{CostKind::VarianceChange, 0.0, 0};
  std::optional<double> penalty;  // empty -> BIC-style default per series
  ThresholdConfig threshold;
  KMeansConfig kmeans;
  TrendConfig trend;
  bool use_log_returns = false;   // default: changepoints on raw index levels
  bool with_garch = false;
  bool with_svg = true;
  std::string out_dir = "out";
};

struct CountryResult {
  std::string country;
  Segmentation segmentation;
  double penalty_used = 0.0;
  std::vector<SignedChangepoint> changepoints;
  // per approach
  std::map<std::string, std::vector<FlowLabel>> labels;
  std::map<std::string, std::vector<Episode>> episodes;
  std::map<std::string, EpisodeTally> tallies;
  std::vector<double> garch_variances;  // empty unless requested
  GarchParams garch_params;
};

struct RunResults {
  std::map<std::string, CountryResult> countries;
  std::map<std::string, std::string> errors;  // country -> diagnostic
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Daily log-returns; output is one shorter than the input and strictly
// positive closes are guaranteed by DailySeries.
inline std::vector<double> log_returns(const std::vector<double>& levels) {
  std::vector<double> r(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    r[i - 1] = std::log(levels[i] / levels[i - 1]);
  }
  return r;
}

}  // namespace detail

// Runs the full three-stage analysis for one country.
inline CountryResult analyze_country(const CountryDataset& data, const RunConfig& cfg) {
  CountryResult res;
  res.country = data.country;

  // Stage 2: variance changepoints in the daily index.
  PeltConfig pelt_cfg = cfg.pelt;
  std::vector<double> cp_input =
      cfg.use_log_returns ? detail::log_returns(data.index.values()) : data.index.values();
  pelt_cfg.penalty = cfg.penalty ? *cfg.penalty
                                 : default_penalty(pelt_cfg.cost, cp_input.size());
  res.penalty_used = pelt_cfg.penalty;
  res.segmentation = pelt(cp_input, pelt_cfg);
  if (cfg.use_log_returns) {
    // Positions refer to the returns series; shift so they index the levels.
    for (std::size_t& tau : res.segmentation.changepoints) ++tau;
  }
  res.changepoints = classify_signs(data.index, res.segmentation, cfg.trend);

  // Stage 1 + 3 per approach: labels, episodes, join.
  auto run_approach = [&](Approach a) {
    std::vector<FlowLabel> labels;
    if (a == Approach::Threshold) {
      labels = label_by_threshold(data.flows, cfg.threshold);
    } else {
      KMeansResult km = kmeans_hartigan_wong(data.flows.values(), cfg.kmeans);
      labels = label_by_cluster_mean(km);
    }
    const std::string key = to_string(a);
    res.labels[key] = labels;
    res.episodes[key] = extract_episodes(labels, data.flows);
    res.tallies[key] = tally(res.episodes[key], res.changepoints);
  };
  if (cfg.run_threshold) run_approach(Approach::Threshold);
  if (cfg.run_clustering) run_approach(Approach::Clustering);

  if (cfg.with_garch) {
    res.garch_params = garch_fit(data.flows.values());
    res.garch_variances = garch_filter(data.flows.values(), res.garch_params);
  }
  return res;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw error("cannot write " + p.string());
  out << content;
}

inline nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["approach"] = cfg.run_threshold && cfg.run_clustering
                      ? "both"
                      : (cfg.run_threshold ? "threshold" : "clustering");
  j["pelt"] = {{"cost", to_string(cfg.pelt.cost)},
               {"penalty", cfg.penalty ? nlohmann::json(*cfg.penalty) : nlohmann::json("auto")},
               {"min_segment_len", cfg.pelt.effective_min_segment_len()},
               {"input", cfg.use_log_returns ? "log_returns" : "levels"}};
  j["threshold"] = {{"percentile", cfg.threshold.percentile}};
  j["kmeans"] = {{"k", cfg.kmeans.k},
                 {"max_sweeps", cfg.kmeans.max_sweeps},
                 {"restarts", cfg.kmeans.restarts},
                 {"seed", cfg.kmeans.rng_seed}};
  j["trend"] = {{"window", cfg.trend.window}};
  j["garch"] = cfg.with_garch;
  return j;
}

}  // namespace detail

// Runs every country, writes all artifacts under cfg.out_dir and returns the
// in-memory bundle. A failing country is reported in the manifest and skipped;
// the others are unaffected. Output is byte-deterministic for fixed inputs
// and configuration.
inline RunResults run_pipeline(const std::map<std::string, CountryDataset>& datasets,
                               const RunConfig& cfg) {
  namespace fs = std::filesystem;
  RunResults results;
  fs::create_directories(cfg.out_dir);

  for (const auto& [country, data] : datasets) {
    try {
      results.countries.emplace(country, analyze_country(data, cfg));
    } catch (const std::exception& e) {
      results.errors[country] = e.what();
    }
  }

  std::vector<std::string> approaches;
  if (cfg.run_threshold) approaches.push_back("threshold");
  if (cfg.run_clustering) approaches.push_back("clustering");

  // episodes.csv
  {
    std::string out = "country,approach,kind,start,end,quarters\n";
    for (const auto& [country, r] : results.countries) {
      for (const std::string& a : approaches) {
        for (const Episode& e : r.episodes.at(a)) {
          out += country + "," + a + "," + to_string(e.kind) + "," + e.start.to_string() +
                 "," + e.end.to_string() + "," + std::to_string(e.quarters()) + "\n";
        }
      }
    }
    detail::write_file(fs::path(cfg.out_dir) / "episodes.csv", out);
  }

  // labels.csv
  {
    std::string out = "country,approach,quarter,label\n";
    for (const auto& [country, r] : results.countries) {
      const QuarterlySeries& flows = datasets.at(country).flows;
      for (const std::string& a : approaches) {
        const auto& labels = r.labels.at(a);
        for (std::size_t i = 0; i < labels.size(); ++i) {
          out += country + "," + a + "," + flows.quarter_at(i).to_string() + "," +
                 to_string(labels[i]) + "\n";
        }
      }
    }
    detail::write_file(fs::path(cfg.out_dir) / "labels.csv", out);
  }

  // changepoints.json
  {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [country, r] : results.countries) {
      nlohmann::json c;
      c["positions"] = r.segmentation.changepoints;  // 1-based
      nlohmann::json dates = nlohmann::json::array();
      nlohmann::json signs = nlohmann::json::array();
      for (const SignedChangepoint& cp : r.changepoints) {
        dates.push_back(cp.date.to_string());
        signs.push_back(to_string(cp.sign));
      }
      c["dates"] = dates;
      c["signs"] = signs;
      c["total_cost"] = r.segmentation.total_cost;
      c["penalty"] = r.penalty_used;
      c["cost_kind"] = to_string(cfg.pelt.cost);
      j[country] = c;
    }
    detail::write_file(fs::path(cfg.out_dir) / "changepoints.json", j.dump(2) + "\n");
  }

  // tally.csv + tally.txt
  {
    std::string out =
        "country,approach,surge_pos,surge_neg,normal_pos,normal_neg,outflow_pos,"
        "outflow_neg,total\n";
    std::map<std::string, EpisodeTally> totals;
    for (const auto& [country, r] : results.countries) {
      for (const std::string& a : approaches) {
        const EpisodeTally& t = r.tallies.at(a);
        totals[a] += t;
        out += country + "," + a + "," + std::to_string(t.surge_pos) + "," +
               std::to_string(t.surge_neg) + "," + std::to_string(t.normal_pos) + "," +
               std::to_string(t.normal_neg) + "," + std::to_string(t.outflow_pos) + "," +
               std::to_string(t.outflow_neg) + "," + std::to_string(t.total()) + "\n";
      }
    }
    for (const std::string& a : approaches) {
      const EpisodeTally& t = totals[a];
      out += "TOTAL," + a + "," + std::to_string(t.surge_pos) + "," +
             std::to_string(t.surge_neg) + "," + std::to_string(t.normal_pos) + "," +
             std::to_string(t.normal_neg) + "," + std::to_string(t.outflow_pos) + "," +
             std::to_string(t.outflow_neg) + "," + std::to_string(t.total()) + "\n";
    }
    detail::write_file(fs::path(cfg.out_dir) / "tally.csv", out);

    std::string txt;
    for (const std::string& a : approaches) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-14s %6s %6s %6s %6s %6s %6s %6s\n",
                    ("[" + a + "]").c_str(), "S+", "S-", "N+", "N-", "O+", "O-", "total");
      txt += buf;
      for (const auto& [country, r] : results.countries) {
        const EpisodeTally& t = r.tallies.at(a);
        std::snprintf(buf, sizeof buf, "%-14s %6ld %6ld %6ld %6ld %6ld %6ld %6ld\n",
                      country.c_str(), t.surge_pos, t.surge_neg, t.normal_pos,
                      t.normal_neg, t.outflow_pos, t.outflow_neg, t.total());
        txt += buf;
      }
      const EpisodeTally& t = totals[a];
      std::snprintf(buf, sizeof buf, "%-14s %6ld %6ld %6ld %6ld %6ld %6ld %6ld\n", "TOTAL",
                    t.surge_pos, t.surge_neg, t.normal_pos, t.normal_neg, t.outflow_pos,
                    t.outflow_neg, t.total());
      txt += buf;
      txt += "\n";
    }
    detail::write_file(fs::path(cfg.out_dir) / "tally.txt", txt);
  }

  // audit.csv: one row per changepoint and approach
  {
    std::string out = "country,approach,date,quarter,regime,sign\n";
    for (const auto& [country, r] : results.countries) {
      for (const std::string& a : approaches) {
        const std::vector<FlowLabel> regimes = assign(r.episodes.at(a), r.changepoints);
        for (std::size_t i = 0; i < r.changepoints.size(); ++i) {
          const SignedChangepoint& cp = r.changepoints[i];
          out += country + "," + a + "," + cp.date.to_string() + "," +
                 date_to_quarter(cp.date).to_string() + "," + to_string(regimes[i]) + "," +
                 to_string(cp.sign) + "\n";
        }
      }
    }
    detail::write_file(fs::path(cfg.out_dir) / "audit.csv", out);
  }

  // Per-country plot data and optional SVG.
  for (const auto& [country, r] : results.countries) {
    const DailySeries& index = datasets.at(country).index;
    const std::vector<double> ma = moving_average(index, cfg.trend.window);
    std::map<std::size_t, const SignedChangepoint*> cp_at;
    for (const SignedChangepoint& cp : r.changepoints) cp_at[cp.position] = &cp;

    std::string out = "date,index,ma,changepoint,sign\n";
    for (std::size_t i = 0; i < index.size(); ++i) {
      auto it = cp_at.find(i + 1);
      out += index.dates()[i].to_string() + "," + detail::fmt_double(index.values()[i]) +
             "," + detail::fmt_double(ma[i + 1]) + "," + (it != cp_at.end() ? "1" : "0") +
             "," + (it != cp_at.end() ? to_string(it->second->sign) : "") + "\n";
    }
    detail::write_file(fs::path(cfg.out_dir) / ("plot_" + country + ".csv"), out);

    if (cfg.with_svg) {
      for (const std::string& a : approaches) {
        const std::string svg = render_svg(index, ma, r.changepoints, r.episodes.at(a),
                                           country + " (" + a + ")");
        detail::write_file(fs::path(cfg.out_dir) / ("plot_" + country + "_" + a + ".svg"),
                           svg);
      }
    }
  }

  // garch.csv
  if (cfg.with_garch) {
    std::string out = "country,quarter,cond_variance\n";
    for (const auto& [country, r] : results.countries) {
      const QuarterlySeries& flows = datasets.at(country).flows;
      for (std::size_t i = 0; i < r.garch_variances.size(); ++i) {
        out += country + "," + flows.quarter_at(i).to_string() + "," +
               detail::fmt_double(r.garch_variances[i]) + "\n";
      }
    }
    detail::write_file(fs::path(cfg.out_dir) / "garch.csv", out);
  }

  // Manifest last: config, seeds and version for an exact rerun.
  {
    nlohmann::json j;
    j["config"] = detail::config_json(cfg);
    nlohmann::json countries = nlohmann::json::array();
    for (const auto& [country, r] : results.countries) {
      countries.push_back({{"country", country},
                           {"changepoints", r.segmentation.changepoints.size()},
                           {"penalty", r.penalty_used}});
    }
    j["countries"] = countries;
    nlohmann::json errs = nlohmann::json::object();
    for (const auto& [country, msg] : results.errors) errs[country] = msg;
    j["errors"] = errs;
    detail::write_file(fs::path(cfg.out_dir) / "manifest.json", j.dump(2) + "\n");
  }
  return results;
}

}  // namespace flowseg
