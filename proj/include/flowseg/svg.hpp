#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "flowseg/episodes.hpp"
#include "flowseg/series.hpp"
#include "flowseg/trend.hpp"

namespace flowseg {

// Minimal static SVG: index and moving-average lines, dashed vertical lines
// at changepoints, shaded bands over episode quarters. Display-only output;
// no interactivity and no external dependencies.
inline std::string render_svg(const DailySeries& series, const std::vector<double>& ma,
                              const std::vector<SignedChangepoint>& changepoints,
                              const std::vector<Episode>& episodes,
                              const std::string& title) {
  const int W = 960, H = 360, L = 50, R = 15, T = 28, B = 24;
  const double plot_w = W - L - R, plot_h = H - T - B;
  const std::size_t n = series.size();

  double lo = series.values()[0], hi = lo;
  for (double v : series.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1.0;

  const long d0 = 0, d1 = static_cast<long>(n) - 1;
  auto x_of = [&](std::size_t i) {
    return L + plot_w * static_cast<double>(static_cast<long>(i) - d0) /
                   static_cast<double>(d1 - d0);
  };
  auto y_of = [&](double v) { return T + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">"
     << title << "</text>\n";

  // Episode bands at quarter resolution, clipped to the plotted date range.
  for (const Episode& e : episodes) {
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Quarter q = date_to_quarter(series.dates()[i]);
      if (!(q < e.start) && !(e.end < q)) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    if (first >= n) continue;
    const std::string fill = e.kind == FlowLabel::Surge ? "#cfe3f5" : "#d9d9d9";
    os << "<rect x=\"" << fmt(x_of(first)) << "\" y=\"" << T << "\" width=\""
       << fmt(std::max(1.0, x_of(last) - x_of(first))) << "\" height=\"" << fmt(plot_h)
       << "\" fill=\"" << fill << "\"/>\n";
  }

  auto polyline = [&](const std::vector<double>& ys, bool one_based,
                      const std::string& color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      const double v = one_based ? ys[i + 1] : ys[i];
      os << fmt(x_of(i)) << "," << fmt(y_of(v)) << " ";
    }
    os << "\"/>\n";
  };
  polyline(series.values(), false, "#1f4e9c");
  polyline(ma, true, "#c23b21");

  for (const SignedChangepoint& cp : changepoints) {
    const double x = x_of(cp.position - 1);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << T << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(T + plot_h) << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n";
  }

  // Axis frame and value range labels.
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << fmt(plot_w)
     << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"4\" y=\"" << T + 10 << "\" font-family=\"sans-serif\" font-size=\"10\">"
     << fmt(hi) << "</text>\n";
  os << "<text x=\"4\" y=\"" << fmt(T + plot_h) << "\" font-family=\"sans-serif\" "
     << "font-size=\"10\">" << fmt(lo) << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 8
     << "\" font-family=\"sans-serif\" font-size=\"10\">"
     << series.dates().front().to_string() << "</text>\n";
  os << "<text x=\"" << fmt(W - R - 70) << "\" y=\"" << H - 8
     << "\" font-family=\"sans-serif\" font-size=\"10\">"
     << series.dates().back().to_string() << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace flowseg
