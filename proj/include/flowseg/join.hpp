#pragma once

#include <map>
#include <string>
#include <vector>

#include "flowseg/calendar.hpp"
#include "flowseg/episodes.hpp"
#include "flowseg/error.hpp"
#include "flowseg/trend.hpp"

namespace flowseg {

// Quarter-resolution membership: a changepoint belongs to the episode whose
// quarter interval covers its quarter, otherwise the flow regime is Normal.
inline FlowLabel assign_regime(const std::vector<Episode>& episodes, const Quarter& q) {
  FlowLabel found = FlowLabel::Normal;
  bool seen = false;
  for (const Episode& e : episodes) {
    if (!e.contains(q)) continue;
    if (seen && e.kind != found) {
      throw data_error("overlapping episodes of different kinds at " + q.to_string());
    }
    found = e.kind;
    seen = true;
  }
  return found;
}

inline std::vector<FlowLabel> assign(const std::vector<Episode>& episodes,
                                     const std::vector<SignedChangepoint>& cps) {
  std::vector<FlowLabel> out;
  out.reserve(cps.size());
  for (const SignedChangepoint& cp : cps) {
    out.push_back(assign_regime(episodes, date_to_quarter(cp.date)));
  }
  return out;
}

// The Table-2/3 cross tabulation for one country and approach.
struct EpisodeTally {
  long surge_pos = 0, surge_neg = 0;
  long normal_pos = 0, normal_neg = 0;
  long outflow_pos = 0, outflow_neg = 0;

  long total() const {
    return surge_pos + surge_neg + normal_pos + normal_neg + outflow_pos + outflow_neg;
  }
  long surge() const { return surge_pos + surge_neg; }
  long normal() const { return normal_pos + normal_neg; }
  long outflow() const { return outflow_pos + outflow_neg; }

  EpisodeTally& operator+=(const EpisodeTally& o) {
    surge_pos += o.surge_pos;
    surge_neg += o.surge_neg;
    normal_pos += o.normal_pos;
    normal_neg += o.normal_neg;
    outflow_pos += o.outflow_pos;
    outflow_neg += o.outflow_neg;
    return *this;
  }
};

inline EpisodeTally tally(const std::vector<FlowLabel>& regimes,
                          const std::vector<SignedChangepoint>& cps) {
  if (regimes.size() != cps.size()) {
    throw data_error("tally: regime/changepoint length mismatch");
  }
  EpisodeTally t;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const bool pos = cps[i].sign == TrendSign::Positive;
    switch (regimes[i]) {
      case FlowLabel::Surge: (pos ? t.surge_pos : t.surge_neg)++; break;
      case FlowLabel::Normal: (pos ? t.normal_pos : t.normal_neg)++; break;
      case FlowLabel::Outflow: (pos ? t.outflow_pos : t.outflow_neg)++; break;
    }
  }
  return t;
}

inline EpisodeTally tally(const std::vector<Episode>& episodes,
                          const std::vector<SignedChangepoint>& cps) {
  return tally(assign(episodes, cps), cps);
}

}  // namespace flowseg
