#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gainloss/errors.hpp"

namespace gainloss {

// Static figure emission. Output bytes are a pure function of the inputs:
// fixed layout, fixed tick rules, fixed "%.6g" number formatting.
struct PlotSeries {
  enum class Style { stars, rings, line };
  std::string label;
  Style style = Style::line;
  std::string color = "#000000";
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

// 1/2/5 ladder covering [lo, hi] with at most ~6 ticks.
inline std::vector<double> linear_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) { step = mag * m; break; }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-9 * span; t += step) ticks.push_back(t == 0.0 ? 0.0 : t);
  return ticks;
}

inline std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int k0 = static_cast<int>(std::floor(std::log10(lo) + 1e-12));
  const int k1 = static_cast<int>(std::ceil(std::log10(hi) - 1e-12));
  for (int k = k0; k <= k1; ++k) ticks.push_back(std::pow(10.0, k));
  return ticks;
}

}  // namespace detail

inline std::string render_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  std::size_t n_points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw SizeError("render_plot_svg: x/y size mismatch");
    n_points += s.x.size();
  }
  if (series.empty() || n_points == 0) {
    throw EmptyInputError("render_plot_svg: nothing to plot");
  }

  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && !(s.x[i] > 0.0)) {
        throw DomainError("render_plot_svg: non-positive x on a log axis");
      }
      if (first) {
        x_lo = x_hi = s.x[i];
        y_lo = y_hi = s.y[i];
        first = false;
      } else {
        x_lo = std::min(x_lo, s.x[i]);
        x_hi = std::max(x_hi, s.x[i]);
        y_lo = std::min(y_lo, s.y[i]);
        y_hi = std::max(y_hi, s.y[i]);
      }
    }
  }
  if (x_hi == x_lo) { x_lo -= 1.0; x_hi += 1.0; }
  if (y_hi == y_lo) { y_lo -= 1.0; y_hi += 1.0; }
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double ml = 62, mr = 18, mt = 38, mb = 48;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;
  const auto tx = [&](double x) {
    const double u = spec.log_x ? (std::log10(x) - std::log10(x_lo)) /
                                      (std::log10(x_hi) - std::log10(x_lo))
                                : (x - x_lo) / (x_hi - x_lo);
    return ml + u * pw;
  };
  const auto ty = [&](double y) { return mt + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  using detail::svg_num;
  using detail::xml_escape;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << svg_num(ml + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(spec.title) << "</text>\n";

  // frame
  out << "<rect x=\"" << svg_num(ml) << "\" y=\"" << svg_num(mt) << "\" width=\"" << svg_num(pw)
      << "\" height=\"" << svg_num(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  const std::vector<double> xticks =
      spec.log_x ? detail::decade_ticks(x_lo, x_hi) : detail::linear_ticks(x_lo, x_hi);
  for (double t : xticks) {
    if (t < x_lo || t > x_hi) continue;
    const double px = tx(t);
    out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << svg_num(mt + ph) << "\" x2=\""
        << svg_num(px) << "\" y2=\"" << svg_num(mt + ph + 5) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << svg_num(px) << "\" y=\"" << svg_num(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << svg_num(t)
        << "</text>\n";
  }
  for (double t : detail::linear_ticks(y_lo, y_hi)) {
    if (t < y_lo || t > y_hi) continue;
    const double py = ty(t);
    out << "<line x1=\"" << svg_num(ml - 5) << "\" y1=\"" << svg_num(py) << "\" x2=\""
        << svg_num(ml) << "\" y2=\"" << svg_num(py) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << svg_num(ml - 8) << "\" y=\"" << svg_num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << svg_num(t)
        << "</text>\n";
  }
  out << "<text x=\"" << svg_num(ml + pw / 2) << "\" y=\"" << svg_num(mt + ph + 36)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << xml_escape(spec.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << svg_num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << svg_num(mt + ph / 2) << ")\">" << xml_escape(spec.y_label) << "</text>\n";

  double legend_y = mt + 14;
  for (const auto& s : series) {
    out << "<g class=\"series\" data-label=\"" << xml_escape(s.label) << "\" data-style=\""
        << (s.style == PlotSeries::Style::stars
                ? "stars"
                : s.style == PlotSeries::Style::rings ? "rings" : "line")
        << "\">\n";
    if (s.style == PlotSeries::Style::line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out << ' ';
        out << svg_num(tx(s.x[i])) << ',' << svg_num(ty(s.y[i]));
      }
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double px = tx(s.x[i]);
        const double py = ty(s.y[i]);
        if (s.style == PlotSeries::Style::rings) {
          out << "<circle cx=\"" << svg_num(px) << "\" cy=\"" << svg_num(py)
              << "\" r=\"3.2\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
        } else {
          // four-stroke asterisk
          out << "<path stroke=\"" << s.color << "\" d=\"M" << svg_num(px - 3.4) << ' '
              << svg_num(py) << " H" << svg_num(px + 3.4) << " M" << svg_num(px) << ' '
              << svg_num(py - 3.4) << " V" << svg_num(py + 3.4) << " M" << svg_num(px - 2.4)
              << ' ' << svg_num(py - 2.4) << " L" << svg_num(px + 2.4) << ' '
              << svg_num(py + 2.4) << " M" << svg_num(px - 2.4) << ' ' << svg_num(py + 2.4)
              << " L" << svg_num(px + 2.4) << ' ' << svg_num(py - 2.4) << "\"/>\n";
        }
      }
    }
    if (!s.label.empty()) {
      out << "<text x=\"" << svg_num(ml + pw - 8) << "\" y=\"" << svg_num(legend_y)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
          << s.color << "\">" << xml_escape(s.label) << "</text>\n";
      legend_y += 14;
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_plot_svg(const std::string& path, const PlotSpec& spec,
                           const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << render_plot_svg(spec, series);
}

}  // namespace gainloss
