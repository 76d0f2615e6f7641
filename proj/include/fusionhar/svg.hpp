#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fusionhar/core.hpp"

namespace fusionhar::svg {

inline std::string escape(std::string_view s) {
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

// Fixed-precision number for attribute values, so output is stable.
inline std::string num(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series
};

inline constexpr std::array<const char*, 6> kPalette = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
                                                        "#937860"};

// Grouped vertical bars on a [y_min, y_max] axis.
inline std::string grouped_bar_chart(const std::string& title, const std::vector<std::string>& series,
                                     const std::vector<BarGroup>& groups, double y_min = 0.0, double y_max = 1.0) {
  const double width = 160.0 + 120.0 * static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double height = 420.0;
  const double left = 70.0, right = 180.0, top = 50.0, bottom = 60.0;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto y_of = [&](double v) {
    const double t = std::clamp((v - y_min) / (y_max - y_min), 0.0, 1.0);
    return top + plot_h * (1.0 - t);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width, 0) + "\" height=\"" + num(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_min + (y_max - y_min) * tick / 5.0;
    const double y = y_of(v);
    out += "<line x1=\"" + num(left, 1) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + plot_w, 1) + "\" y2=\"" +
           num(y) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + num(left - 6, 1) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + num(v, 2) +
           "</text>\n";
  }
  out += "<line x1=\"" + num(left, 1) + "\" y1=\"" + num(top, 1) + "\" x2=\"" + num(left, 1) + "\" y2=\"" +
         num(top + plot_h, 1) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(left, 1) + "\" y1=\"" + num(top + plot_h, 1) + "\" x2=\"" + num(left + plot_w, 1) +
         "\" y2=\"" + num(top + plot_h, 1) + "\" stroke=\"black\"/>\n";

  const double group_w = groups.empty() ? plot_w : plot_w / static_cast<double>(groups.size());
  const double bar_w = series.empty() ? 0.0 : group_w * 0.8 / static_cast<double>(series.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = left + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t s = 0; s < groups[g].values.size() && s < series.size(); ++s) {
      const double v = groups[g].values[s];
      if (std::isnan(v)) continue;
      const double y = y_of(v);
      out += "<rect x=\"" + num(gx + bar_w * static_cast<double>(s)) + "\" y=\"" + num(y) + "\" width=\"" +
             num(bar_w) + "\" height=\"" + num(top + plot_h - y) + "\" fill=\"" + kPalette[s % kPalette.size()] +
             "\"><title>" + escape(groups[g].label) + " / " + escape(series[s]) + ": " + num(v, 4) +
             "</title></rect>\n";
    }
    out += "<text x=\"" + num(gx + group_w * 0.4) + "\" y=\"" + num(top + plot_h + 20, 1) +
           "\" text-anchor=\"middle\">" + escape(groups[g].label) + "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top + 20.0 * static_cast<double>(s);
    out += "<rect x=\"" + num(left + plot_w + 16, 1) + "\" y=\"" + num(ly) + "\" width=\"12\" height=\"12\" fill=\"" +
           kPalette[s % kPalette.size()] + "\"/>\n";
    out += "<text x=\"" + num(left + plot_w + 34, 1) + "\" y=\"" + num(ly + 10) + "\">" + escape(series[s]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// Blue (-1) through white (0) to red (+1).
inline std::string diverging_color(double r) {
  r = std::clamp(r, -1.0, 1.0);
  const auto mix = [](double a, double b, double t) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  int cr, cg, cb;
  if (r >= 0) {
    cr = mix(255, 178, r);
    cg = mix(255, 24, r);
    cb = mix(255, 43, r);
  } else {
    cr = mix(255, 33, -r);
    cg = mix(255, 102, -r);
    cb = mix(255, 172, -r);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", cr, cg, cb);
  return buf;
}

inline std::string heat_map(const std::string& title, const std::vector<std::string>& labels,
                            const std::vector<std::vector<double>>& values) {
  const double cell = 56.0, left = 190.0, top = 60.0;
  const double n = static_cast<double>(labels.size());
  const double width = left + cell * n + 30.0, height = top + cell * n + 170.0;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width, 0) + "\" height=\"" + num(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2, 1) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = top + cell * static_cast<double>(i);
    out += "<text x=\"" + num(left - 6, 1) + "\" y=\"" + num(y + cell / 2 + 4) + "\" text-anchor=\"end\">" +
           escape(labels[i]) + "</text>\n";
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const double x = left + cell * static_cast<double>(j);
      const double v = values[i][j];
      out += "<rect x=\"" + num(x, 1) + "\" y=\"" + num(y, 1) + "\" width=\"" + num(cell, 1) + "\" height=\"" +
             num(cell, 1) + "\" fill=\"" + diverging_color(v) + "\" stroke=\"white\"/>\n";
      out += "<text x=\"" + num(x + cell / 2, 1) + "\" y=\"" + num(y + cell / 2 + 4, 1) +
             "\" text-anchor=\"middle\">" + num(v, 2) + "</text>\n";
    }
  }
  const double base = top + cell * n + 8.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const double x = left + cell * static_cast<double>(j) + cell / 2;
    out += "<text transform=\"translate(" + num(x, 1) + "," + num(base, 1) +
           ") rotate(45)\" text-anchor=\"start\">" + escape(labels[j]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace fusionhar::svg
