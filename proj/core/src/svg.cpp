#include "vrp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace vrp {

namespace {

constexpr double kMargin = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void widen() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

Range range_of(std::span<const double> v) {
  Range r;
  bool first = true;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    if (first) {
      r.lo = r.hi = x;
      first = false;
    }
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
  return r;
}

}  // namespace

std::string render_scatter(const ScatterPlot& plot) {
  const double w = plot.width;
  const double h = plot.height;
  Range xr = range_of(plot.x);
  Range yr = range_of(plot.y);
  if (plot.fit) {
    const Range lo = range_of(plot.fit->lower);
    const Range hi = range_of(plot.fit->upper);
    yr.lo = std::min({yr.lo, lo.lo, hi.lo});
    yr.hi = std::max({yr.hi, lo.hi, hi.hi});
  }
  xr.widen();
  yr.widen();
  auto px = [&](double x) { return kMargin + (x - xr.lo) / (xr.hi - xr.lo) * (w - 2 * kMargin); };
  auto py = [&](double y) { return h - kMargin - (y - yr.lo) / (yr.hi - yr.lo) * (h - 2 * kMargin); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) +
       "\" height=\"" + std::to_string(plot.height) + "\" viewBox=\"0 0 " +
       std::to_string(plot.width) + " " + std::to_string(plot.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (plot.fit && !plot.fit->x.empty()) {
    const auto& f = *plot.fit;
    s += "<polygon fill=\"#4c72b0\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t k = 0; k < f.x.size(); ++k) {
      s += num(px(f.x[k])) + "," + num(py(f.upper[k])) + " ";
    }
    for (std::size_t k = f.x.size(); k-- > 0;) {
      s += num(px(f.x[k])) + "," + num(py(f.lower[k])) + (k ? " " : "");
    }
    s += "\"/>\n";
    const double x0 = f.x.front();
    const double x1 = f.x.back();
    s += "<line stroke=\"#4c72b0\" stroke-width=\"2\" x1=\"" + num(px(x0)) + "\" y1=\"" +
         num(py(f.intercept + f.slope * x0)) + "\" x2=\"" + num(px(x1)) + "\" y2=\"" +
         num(py(f.intercept + f.slope * x1)) + "\"/>\n";
  }

  const std::size_t count = std::min(plot.x.size(), plot.y.size());
  for (std::size_t k = 0; k < count; ++k) {
    if (!std::isfinite(plot.x[k]) || !std::isfinite(plot.y[k])) continue;
    s += "<circle r=\"3\" fill=\"#dd8452\" cx=\"" + num(px(plot.x[k])) + "\" cy=\"" +
         num(py(plot.y[k])) + "\"/>\n";
  }

  // Axes with end ticks.
  const double left = kMargin;
  const double bottom = h - kMargin;
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(w - kMargin) +
       "\" y2=\"" + num(bottom) + "\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(left) +
       "\" y2=\"" + num(kMargin) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  s += "<text x=\"" + num(left) + "\" y=\"" + num(bottom + 14) + "\">" + tick(xr.lo) + "</text>\n";
  s += "<text x=\"" + num(w - kMargin) + "\" y=\"" + num(bottom + 14) +
       "\" text-anchor=\"end\">" + tick(xr.hi) + "</text>\n";
  s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(bottom) + "\" text-anchor=\"end\">" +
       tick(yr.lo) + "</text>\n";
  s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(kMargin + 4) + "\" text-anchor=\"end\">" +
       tick(yr.hi) + "</text>\n";
  s += "<text x=\"" + num(w / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">" +
       escape(plot.x_label) + "</text>\n";
  s += "<text transform=\"translate(14," + num(h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(plot.y_label) + "</text>\n";
  s += "<text x=\"" + num(w / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
       escape(plot.title) + "</text>\n";
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace vrp
