#include "hanbias/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hanbias/error.hpp"

namespace hanbias {
namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kLeft = 70.0, kRight = 780.0, kTop = 30.0, kBottom = 545.0;

struct Range {
  double lo, hi;
  double to_px(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

Range padded(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  double pad = (hi - lo) * 0.06;
  if (pad == 0.0) pad = std::max(1.0, std::fabs(lo) * 0.1);
  return Range{lo - pad, hi + pad};
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

void appendf(std::string& out, const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  out += buf;
}

}  // namespace

std::string render_scatter_svg(const ScatterData& data,
                               const SvgOptions& options) {
  if (data.rows.empty()) throw Error("scatter plot needs at least one point");

  double x_lo = options.threshold, x_hi = options.threshold;
  double y_lo = data.rows.front().bias_score, y_hi = y_lo;
  for (const auto& row : data.rows) {
    x_lo = std::min(x_lo, row.human_score);
    x_hi = std::max(x_hi, row.human_score);
    y_lo = std::min(y_lo, row.bias_score);
    y_hi = std::max(y_hi, row.bias_score);
  }
  const Range xr = padded(x_lo, x_hi);
  const Range yr = padded(y_lo, y_hi);
  // SVG y grows downward, so the pixel range is flipped.
  auto px = [&](double v) { return xr.to_px(v, kLeft, kRight); };
  auto py = [&](double v) { return yr.to_px(v, kBottom, kTop); };

  std::string svg;
  appendf(svg,
          "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
          "height=\"%g\" viewBox=\"0 0 %g %g\">\n",
          kWidth, kHeight, kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes.
  appendf(svg,
          "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
          kLeft, kTop, kLeft, kBottom);
  appendf(svg,
          "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
          kLeft, kBottom, kRight, kBottom);

  // Ticks: 5 per axis.
  for (int i = 0; i <= 4; ++i) {
    const double vx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    appendf(svg,
            "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
            "stroke=\"black\"/>\n",
            px(vx), kBottom, px(vx), kBottom + 5.0);
    appendf(svg,
            "<text x=\"%g\" y=\"%g\" font-size=\"12\" "
            "text-anchor=\"middle\">%.3g</text>\n",
            px(vx), kBottom + 20.0, vx);
    const double vy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    appendf(svg,
            "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" "
            "stroke=\"black\"/>\n",
            kLeft - 5.0, py(vy), kLeft, py(vy));
    appendf(svg,
            "<text x=\"%g\" y=\"%g\" font-size=\"12\" "
            "text-anchor=\"end\">%.3g</text>\n",
            kLeft - 8.0, py(vy) + 4.0, vy);
  }

  // Zero line for the bias axis when it is inside the range.
  if (yr.lo < 0.0 && yr.hi > 0.0)
    appendf(svg,
            "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#bbbbbb\" "
            "stroke-dasharray=\"2,4\"/>\n",
            kLeft, py(0.0), kRight, py(0.0));

  // Threshold marker.
  if (options.threshold > xr.lo && options.threshold < xr.hi) {
    appendf(svg,
            "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#cc3333\" "
            "stroke-dasharray=\"6,4\"/>\n",
            px(options.threshold), kTop, px(options.threshold), kBottom);
    appendf(svg,
            "<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"#cc3333\" "
            "text-anchor=\"middle\">%g</text>\n",
            px(options.threshold), kTop - 8.0, options.threshold);
  }

  for (const auto& row : data.rows)
    appendf(svg,
            "<circle cx=\"%g\" cy=\"%g\" r=\"3.5\" fill=\"#31708f\" "
            "fill-opacity=\"0.75\"/>\n",
            px(row.human_score), py(row.bias_score));

  appendf(svg,
          "<text x=\"%g\" y=\"%g\" font-size=\"14\" "
          "text-anchor=\"middle\">%s</text>\n",
          (kLeft + kRight) / 2.0, kHeight - 12.0,
          escape(options.x_label).c_str());
  appendf(svg,
          "<text x=\"%g\" y=\"%g\" font-size=\"14\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 18 %g)\">%s</text>\n",
          18.0, (kTop + kBottom) / 2.0, (kTop + kBottom) / 2.0,
          escape(options.y_label).c_str());
  svg += "</svg>\n";
  return svg;
}

void save_scatter_svg(const ScatterData& data, const std::string& path,
                      const SvgOptions& options) {
  const std::string svg = render_scatter_svg(data, options);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << svg).flush())
    throw Error("cannot write svg: " + path);
}

}  // namespace hanbias
