// Command-line front end: episode identification, changepoint detection,
// GARCH variances, the changepoint/episode join, the full pipeline, and the
// bundled reproduction checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowseg/changepoint.hpp"
#include "flowseg/clustering.hpp"
#include "flowseg/csv.hpp"
#include "flowseg/episodes.hpp"
#include "flowseg/error.hpp"
#include "flowseg/join.hpp"
#include "flowseg/pipeline.hpp"
#include "flowseg/reproduce.hpp"
#include "flowseg/trend.hpp"
#include "flowseg/volatility.hpp"

namespace {

using nlohmann::json;

std::string default_out_dir() {
  const char* env = std::getenv("FLOWSEG_OUT");
  return env && *env ? env : "out";
}

double parse_penalty_or_auto(const std::string& s, std::optional<double>& penalty) {
  if (s == "auto") {
    penalty.reset();
    return 0.0;
  }
  penalty = std::stod(s);
  return *penalty;
}

flowseg::RunConfig make_config(const std::string& approach, double percentile,
                               const std::string& penalty, const std::string& cost,
                               std::size_t window, std::uint64_t seed,
                               const std::string& out, bool log_returns, bool garch) {
  flowseg::RunConfig cfg;
  cfg.run_threshold = approach != "clustering";
  cfg.run_clustering = approach != "threshold";
  cfg.threshold.percentile = percentile;
  cfg.pelt.cost = flowseg::cost_kind_from_string(cost);
  parse_penalty_or_auto(penalty, cfg.penalty);
  if (cfg.penalty) cfg.pelt.penalty = *cfg.penalty;
  cfg.trend.window = window;
  cfg.kmeans.rng_seed = seed;
  cfg.use_log_returns = log_returns;
  cfg.with_garch = garch;
  cfg.out_dir = out;
  return cfg;
}

void write_text(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw flowseg::error("cannot write " + p.string());
  f << content;
}

int cmd_episodes(const std::string& flows_path, const flowseg::RunConfig& cfg) {
  auto flows = flowseg::load_flows(flows_path);
  std::map<std::string, flowseg::CountryDataset> datasets;
  std::string eps_out = "country,approach,kind,start,end,quarters\n";
  std::string labels_out = "country,approach,quarter,label\n";
  for (const auto& [country, series] : flows) {
    std::vector<std::pair<std::string, std::vector<flowseg::FlowLabel>>> runs;
    if (cfg.run_threshold) {
      runs.emplace_back("threshold", flowseg::label_by_threshold(series, cfg.threshold));
    }
    if (cfg.run_clustering) {
      auto km = flowseg::kmeans_hartigan_wong(series.values(), cfg.kmeans);
      runs.emplace_back("clustering", flowseg::label_by_cluster_mean(km));
    }
    for (const auto& [approach, labels] : runs) {
      for (const auto& e : flowseg::extract_episodes(labels, series)) {
        eps_out += country + "," + approach + "," + flowseg::to_string(e.kind) + "," +
                   e.start.to_string() + "," + e.end.to_string() + "," +
                   std::to_string(e.quarters()) + "\n";
      }
      for (std::size_t i = 0; i < labels.size(); ++i) {
        labels_out += country + "," + approach + "," + series.quarter_at(i).to_string() +
                      "," + flowseg::to_string(labels[i]) + "\n";
      }
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  write_text(std::filesystem::path(cfg.out_dir) / "episodes.csv", eps_out);
  write_text(std::filesystem::path(cfg.out_dir) / "labels.csv", labels_out);
  std::cout << "wrote " << cfg.out_dir << "/episodes.csv and labels.csv\n";
  return 0;
}

int cmd_changepoints(const std::string& index_path, const flowseg::RunConfig& cfg) {
  auto index = flowseg::load_index(index_path);
  json out = json::object();
  for (const auto& [country, series] : index) {
    flowseg::PeltConfig pc = cfg.pelt;
    std::vector<double> input = series.values();
    if (cfg.use_log_returns) {
      std::vector<double> r(input.size() - 1);
      for (std::size_t i = 1; i < input.size(); ++i) r[i - 1] = std::log(input[i] / input[i - 1]);
      input = std::move(r);
    }
    pc.penalty = cfg.penalty ? *cfg.penalty : flowseg::default_penalty(pc.cost, input.size());
    flowseg::Segmentation seg = flowseg::pelt(input, pc);
    if (cfg.use_log_returns) {
      for (std::size_t& tau : seg.changepoints) ++tau;
    }
    auto signed_cps = flowseg::classify_signs(series, seg, cfg.trend);
    json c;
    c["positions"] = seg.changepoints;
    json dates = json::array(), signs = json::array();
    for (const auto& cp : signed_cps) {
      dates.push_back(cp.date.to_string());
      signs.push_back(flowseg::to_string(cp.sign));
    }
    c["dates"] = dates;
    c["signs"] = signs;
    c["total_cost"] = seg.total_cost;
    c["penalty"] = pc.penalty;
    c["cost_kind"] = flowseg::to_string(pc.cost);
    out[country] = c;
  }
  std::filesystem::create_directories(cfg.out_dir);
  write_text(std::filesystem::path(cfg.out_dir) / "changepoints.json", out.dump(2) + "\n");
  std::cout << "wrote " << cfg.out_dir << "/changepoints.json\n";
  return 0;
}

int cmd_garch(const std::string& flows_path, const flowseg::RunConfig& cfg,
              bool aggregate_only) {
  auto flows = flowseg::load_flows(flows_path);
  std::string out = "country,quarter,cond_variance\n";
  auto emit = [&](const std::string& name, const flowseg::QuarterlySeries& s) {
    flowseg::GarchParams p = flowseg::garch_fit(s.values());
    auto var = flowseg::garch_filter(s.values(), p);
    for (std::size_t i = 0; i < var.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.10g", var[i]);
      out += name + "," + s.quarter_at(i).to_string() + "," + buf + "\n";
    }
  };
  if (!aggregate_only) {
    for (const auto& [country, series] : flows) emit(country, series);
  }
  if (flows.size() > 1) {
    // Cross-country sum over the common quarter range.
    long lo = LONG_MIN, hi = LONG_MAX;
    for (const auto& [_, s] : flows) {
      lo = std::max(lo, s.start().index());
      hi = std::min(hi, s.end().index());
    }
    if (lo <= hi) {
      std::vector<double> sum(static_cast<std::size_t>(hi - lo + 1), 0.0);
      for (const auto& [_, s] : flows) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
          sum[i] += s.values()[static_cast<std::size_t>(lo - s.start().index()) + i];
        }
      }
      emit("AGGREGATE", flowseg::QuarterlySeries(
                            flowseg::Quarter(static_cast<int>(lo / 4),
                                             static_cast<int>(lo % 4) + 1),
                            std::move(sum)));
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  write_text(std::filesystem::path(cfg.out_dir) / "garch.csv", out);
  std::cout << "wrote " << cfg.out_dir << "/garch.csv\n";
  return 0;
}

int cmd_join(const std::string& episodes_path, const std::string& changepoints_path,
             const flowseg::RunConfig& cfg) {
  // Episodes written by `episodes` or `run`.
  std::map<std::string, std::map<std::string, std::vector<flowseg::Episode>>> episodes;
  for (const auto& r :
       flowseg::csv::read_rows(episodes_path, "country,approach,kind,start,end,quarters")) {
    flowseg::Episode e;
    e.kind = flowseg::flow_label_from_string(r[2]);
    e.start = flowseg::parse_quarter(r[3]);
    e.end = flowseg::parse_quarter(r[4]);
    episodes[r[1]][r[0]].push_back(e);
  }
  std::ifstream in(changepoints_path);
  if (!in) throw flowseg::parse_error("cannot open " + changepoints_path);
  json cps = json::parse(in);

  std::string tally_out =
      "country,approach,surge_pos,surge_neg,normal_pos,normal_neg,outflow_pos,"
      "outflow_neg,total\n";
  std::string audit_out = "country,approach,date,quarter,regime,sign\n";
  for (const auto& [approach, by_country] : episodes) {
    flowseg::EpisodeTally total;
    for (const auto& [country, eps] : by_country) {
      if (!cps.contains(country)) continue;
      std::vector<flowseg::SignedChangepoint> signed_cps;
      const auto& dates = cps[country]["dates"];
      const auto& signs = cps[country]["signs"];
      for (std::size_t i = 0; i < dates.size(); ++i) {
        flowseg::SignedChangepoint cp;
        cp.position = i + 1;
        cp.date = flowseg::parse_date(dates[i].get<std::string>());
        cp.sign = signs[i].get<std::string>() == "positive" ? flowseg::TrendSign::Positive
                                                            : flowseg::TrendSign::Negative;
        signed_cps.push_back(cp);
      }
      auto regimes = flowseg::assign(eps, signed_cps);
      flowseg::EpisodeTally t = flowseg::tally(regimes, signed_cps);
      total += t;
      tally_out += country + "," + approach + "," + std::to_string(t.surge_pos) + "," +
                   std::to_string(t.surge_neg) + "," + std::to_string(t.normal_pos) + "," +
                   std::to_string(t.normal_neg) + "," + std::to_string(t.outflow_pos) +
                   "," + std::to_string(t.outflow_neg) + "," + std::to_string(t.total()) +
                   "\n";
      for (std::size_t i = 0; i < signed_cps.size(); ++i) {
        audit_out += country + "," + approach + "," + signed_cps[i].date.to_string() +
                     "," + flowseg::date_to_quarter(signed_cps[i].date).to_string() + "," +
                     flowseg::to_string(regimes[i]) + "," +
                     flowseg::to_string(signed_cps[i].sign) + "\n";
      }
    }
    tally_out += "TOTAL," + approach + "," + std::to_string(total.surge_pos) + "," +
                 std::to_string(total.surge_neg) + "," + std::to_string(total.normal_pos) +
                 "," + std::to_string(total.normal_neg) + "," +
                 std::to_string(total.outflow_pos) + "," +
                 std::to_string(total.outflow_neg) + "," + std::to_string(total.total()) +
                 "\n";
  }
  std::filesystem::create_directories(cfg.out_dir);
  write_text(std::filesystem::path(cfg.out_dir) / "tally.csv", tally_out);
  write_text(std::filesystem::path(cfg.out_dir) / "audit.csv", audit_out);
  std::cout << "wrote " << cfg.out_dir << "/tally.csv and audit.csv\n";
  return 0;
}

int cmd_run(const std::string& flows_path, const std::string& index_path,
            const flowseg::RunConfig& cfg) {
  auto flows = flowseg::load_flows(flows_path);
  auto index = flowseg::load_index(index_path);
  std::map<std::string, flowseg::CountryDataset> datasets;
  for (const auto& [country, f] : flows) {
    auto it = index.find(country);
    if (it == index.end()) continue;
    datasets.emplace(country, flowseg::CountryDataset{country, f, it->second});
  }
  if (datasets.empty()) {
    throw flowseg::data_error("no country appears in both input files");
  }
  flowseg::RunResults res = flowseg::run_pipeline(datasets, cfg);
  std::cout << "processed " << res.countries.size() << " countries";
  if (!res.errors.empty()) std::cout << ", " << res.errors.size() << " failed";
  std::cout << "; artifacts in " << cfg.out_dir << "\n";
  for (const auto& [country, msg] : res.errors) {
    std::cerr << "  " << country << ": " << msg << "\n";
  }
  return 0;
}

int cmd_reproduce(const std::string& fixtures_dir, bool verbose) {
  flowseg::repro::Report rep = flowseg::repro::reproduce_fixtures(fixtures_dir);
  std::cout << flowseg::repro::format_report(rep, !verbose);
  return rep.failures() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capital-flow episodes, stock-index changepoints, and their join"};
  app.require_subcommand(1);

  std::string flows_path, index_path, episodes_path, changepoints_path;
  std::string approach = "both";
  std::string penalty = "auto";
  std::string cost = "variance";
  std::string out = default_out_dir();
  std::string fixtures_dir = "fixtures";
  double percentile = 0.30;
  std::size_t window = 25;
  std::uint64_t seed = 0;
  bool log_returns = false, with_garch = false, aggregate_only = false, verbose = false;

  auto add_common = [&](CLI::App* sub, bool needs_out = true) {
    if (needs_out) sub->add_option("--out", out, "output directory");
    sub->add_option("--approach", approach, "threshold, clustering or both")
        ->check(CLI::IsMember({"threshold", "clustering", "both"}));
    sub->add_option("--percentile", percentile, "threshold percentile fraction");
    sub->add_option("--penalty", penalty, "changepoint penalty, number or 'auto'");
    sub->add_option("--cost", cost, "changepoint cost kind")
        ->check(CLI::IsMember({"mean", "variance", "meanvar"}));
    sub->add_option("--window", window, "moving-average window");
    sub->add_option("--seed", seed, "k-means RNG seed");
    sub->add_flag("--log-returns", log_returns,
                  "detect changepoints on log-returns instead of levels");
  };

  CLI::App* episodes = app.add_subcommand("episodes", "identify surge/outflow episodes");
  episodes->add_option("--flows", flows_path, "quarterly flows CSV")->required();
  add_common(episodes);

  CLI::App* changepoints =
      app.add_subcommand("changepoints", "detect variance changepoints in stock indices");
  changepoints->add_option("--index", index_path, "daily index CSV")->required();
  add_common(changepoints);

  CLI::App* garch = app.add_subcommand("garch", "GARCH(1,1) conditional variances");
  garch->add_option("--flows", flows_path, "quarterly flows CSV")->required();
  garch->add_flag("--aggregate-only", aggregate_only, "only the cross-country sum");
  add_common(garch);

  CLI::App* join = app.add_subcommand("join", "distribute changepoints over episodes");
  join->add_option("--episodes", episodes_path, "episodes.csv from `episodes`")->required();
  join->add_option("--changepoints", changepoints_path, "changepoints.json")->required();
  add_common(join);

  CLI::App* run = app.add_subcommand("run", "full three-stage pipeline");
  run->add_option("--flows", flows_path, "quarterly flows CSV")->required();
  run->add_option("--index", index_path, "daily index CSV")->required();
  run->add_flag("--garch", with_garch, "also fit GARCH(1,1) per country");
  add_common(run);

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "run the bundled fixture reproduction checks");
  reproduce->add_option("--fixtures", fixtures_dir, "fixtures directory");
  reproduce->add_flag("-v,--verbose", verbose, "print every check, not just notable ones");

  CLI11_PARSE(app, argc, argv);

  try {
    flowseg::RunConfig cfg = make_config(approach, percentile, penalty, cost, window, seed,
                                         out, log_returns, with_garch);
    if (episodes->parsed()) return cmd_episodes(flows_path, cfg);
    if (changepoints->parsed()) return cmd_changepoints(index_path, cfg);
    if (garch->parsed()) return cmd_garch(flows_path, cfg, aggregate_only);
    if (join->parsed()) return cmd_join(episodes_path, changepoints_path, cfg);
    if (run->parsed()) return cmd_run(flows_path, index_path, cfg);
    if (reproduce->parsed()) return cmd_reproduce(fixtures_dir, verbose);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"message", e.what()}, {"type", "flowseg"}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
