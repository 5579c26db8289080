#pragma once

// Minimal deterministic SVG line plots for the benchmark report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "redugoal/bench.hpp"

namespace redugoal {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars, same length as y
};

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Data extent widened by 5% of the span on each side.
inline AxisRange padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace detail

struct PlotRanges {
  AxisRange x, y;
};

/// Ranges over all finite points (error bars included).
inline PlotRanges plot_ranges(const std::vector<PlotSeries>& series) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i] - e);
      yhi = std::max(yhi, s.y[i] + e);
    }
  }
  return {padded_range(xlo, xhi), padded_range(ylo, yhi)};
}

inline std::string render_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                    const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ArgumentError("plot '" + title + "' has no series");
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ArgumentError("series '" + s.label + "' has mismatched x/y lengths");
    bool any = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) any = any || (std::isfinite(s.x[i]) && std::isfinite(s.y[i]));
    if (!any) throw ArgumentError("plot '" + title + "': series '" + s.label + "' is empty");
  }
  const auto r = plot_ranges(series);
  constexpr double W = 720, H = 440, L = 70, R = 160, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - r.x.lo) / (r.x.hi - r.x.lo) * pw; };
  auto sy = [&](double y) { return T + ph - (y - r.y.lo) / (r.y.hi - r.y.lo) * ph; };
  using detail::num;

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::xml_escape(title) + "</text>\n";
  o += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = r.x.lo + (r.x.hi - r.x.lo) * i / 4.0;
    const double yv = r.y.lo + (r.y.hi - r.y.lo) * i / 4.0;
    o += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(T + ph + 16) + "\" text-anchor=\"middle\">" + num(xv) +
         "</text>\n";
    o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
    o += "<line x1=\"" + num(L) + "\" y1=\"" + num(sy(yv)) + "\" x2=\"" + num(L + pw) + "\" y2=\"" + num(sy(yv)) +
         "\" stroke=\"#dddddd\"/>\n";
  }
  o += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" +
       detail::xml_escape(xlabel) + "</text>\n";
  o += "<text transform=\"translate(16," + num(T + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       detail::xml_escape(ylabel) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = detail::kPalette[si % std::size(detail::kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += (pts.empty() ? "" : " ") + num(sx(s.x[i])) + "," + num(sy(s.y[i]));
      if (i < s.err.size() && std::isfinite(s.err[i]) && s.err[i] > 0.0) {
        const double x = sx(s.x[i]);
        o += "<line x1=\"" + num(x) + "\" y1=\"" + num(sy(s.y[i] - s.err[i])) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(sy(s.y[i] + s.err[i])) + "\" stroke=\"" + color + "\"/>\n";
      }
    }
    o += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = T + 14 + 18.0 * static_cast<double>(si);
    o += "<line x1=\"" + num(L + pw + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(L + pw + 32) + "\" y2=\"" +
         num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(L + pw + 38) + "\" y=\"" + num(ly) + "\">" + detail::xml_escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

inline const std::vector<std::pair<std::size_t, std::size_t>>& rank_groups() {
  static const std::vector<std::pair<std::size_t, std::size_t>> groups{
      {1, 1}, {2, 2}, {3, 4}, {5, 8}, {9, 16}, {17, std::numeric_limits<std::size_t>::max()}};
  return groups;
}

inline std::string rank_group_label(const std::pair<std::size_t, std::size_t>& g) {
  if (g.first == g.second) return "rank " + std::to_string(g.first);
  if (g.second == std::numeric_limits<std::size_t>::max()) return "rank " + std::to_string(g.first) + "+";
  return "rank " + std::to_string(g.first) + "-" + std::to_string(g.second);
}

/// Writes cost-vs-time plots (one per strategy and metric, a line per k) and
/// rank-share-vs-time plots (one per strategy and k). Returns written files.
inline std::vector<std::filesystem::path> emit_plots(const std::vector<CostSeries>& costs,
                                                     const std::vector<RankTable>& ranks,
                                                     const std::filesystem::path& out_dir) {
  if (costs.empty()) throw ArgumentError("no cost series to plot");
  if (ranks.empty()) throw ArgumentError("no rank tables to plot");
  std::vector<std::filesystem::path> written;
  std::vector<SelectionStrategy> strategies;
  for (const auto& c : costs) {
    if (std::find(strategies.begin(), strategies.end(), c.strategy) == strategies.end()) {
      strategies.push_back(c.strategy);
    }
  }
  for (auto st : strategies) {
    for (const Metric m : {Metric::length, Metric::exec_time}) {
      std::vector<PlotSeries> series;
      for (const auto& c : costs) {
        if (c.strategy != st) continue;
        PlotSeries s;
        s.label = to_string(st) + " k=" + std::to_string(c.k);
        for (const auto& p : c.points) {
          const MeanCi& v = m == Metric::length ? p.length : p.exec_time;
          s.x.push_back(p.t_ms);
          s.y.push_back(v.n > 0 ? v.mean : NAN);
          s.err.push_back(v.half_width.value_or(0.0));
        }
        series.push_back(std::move(s));
      }
      const std::string what = m == Metric::length ? "length" : "exec_time";
      const auto file = out_dir / (what + "_" + to_string(st) + ".svg");
      write_text_file(file, render_line_plot(what + " vs planning time (" + to_string(st) + ")", "planning time [ms]",
                                             m == Metric::length ? "path length [rad]" : "execution time [s]",
                                             series));
      written.push_back(file);
    }
  }
  for (const auto& t : ranks) {
    std::vector<PlotSeries> series;
    for (const auto& g : rank_groups()) {
      PlotSeries s;
      s.label = rank_group_label(g);
      bool seen = false;
      for (const auto& b : t.buckets) {
        std::size_t n = 0;
        for (const auto& [rank, c] : b.counts) {
          if (rank >= g.first && rank <= g.second) n += c;
        }
        seen = seen || n > 0;
        s.x.push_back(b.end_ms);
        s.y.push_back(b.total > 0 ? static_cast<double>(n) / static_cast<double>(b.total) : NAN);
      }
      if (seen) series.push_back(std::move(s));
    }
    const std::string cell = to_string(t.strategy) + " k=" + std::to_string(t.k);
    if (series.empty()) throw ArgumentError("rank table '" + cell + "' is empty");
    const auto file = out_dir / ("rank_" + to_string(t.strategy) + "_k" + std::to_string(t.k) + ".svg");
    write_text_file(file, render_line_plot("incumbent goal rank over time (" + cell + ")", "planning time [ms]",
                                           "share of runs", series));
    written.push_back(file);
  }
  return written;
}

}  // namespace redugoal
