#include "tvg/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tvg::app {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string esc(const std::string& s) {
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

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (hi == lo) {
      const double w = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= w;
      hi += w;
    }
  }
};

// Step of 1, 2 or 5 times a power of ten giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0) * mag;
}

std::vector<double> ticks(double lo, double hi) {
  const double step = nice_step(hi - lo, 5);
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
  return t;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  Range xr, yr;
  for (const auto& s : chart.lines) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.label + "' has ragged x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.add(s.x[i]);
        yr.add(s.y[i]);
      }
    }
  }
  if (chart.band) {
    const auto& b = *chart.band;
    if (b.lo.size() != b.x.size() || b.hi.size() != b.x.size()) {
      throw std::invalid_argument("band has ragged columns");
    }
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      xr.add(b.x[i]);
      yr.add(b.lo[i]);
      yr.add(b.hi[i]);
    }
  }
  if (xr.empty() || yr.empty()) throw std::invalid_argument("nothing to plot");
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!chart.title.empty()) {
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << esc(chart.title) << "</text>\n";
  }

  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : ticks(xr.lo, xr.hi)) {
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t))
       << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  }
  for (double t : ticks(yr.lo, yr.hi)) {
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw)
       << "\" y2=\"" << num(py(t)) << "\"/>\n";
  }
  os << "</g>\n";
  for (double t : ticks(xr.lo, xr.hi)) {
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(yr.lo, yr.hi)) {
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!chart.x_label.empty()) {
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
       << "\" text-anchor=\"middle\">" << esc(chart.x_label) << "</text>\n";
  }
  if (!chart.y_label.empty()) {
    os << "<text transform=\"translate(16," << num(kTop + ph / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << esc(chart.y_label) << "</text>\n";
  }

  struct LegendEntry {
    std::string label;
    std::string color;
    bool filled;
  };
  std::vector<LegendEntry> legend;

  if (chart.band) {
    const auto& b = *chart.band;
    os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      if (std::isfinite(b.x[i]) && std::isfinite(b.hi[i])) os << num(px(b.x[i])) << ',' << num(py(b.hi[i])) << ' ';
    }
    for (std::size_t i = b.x.size(); i-- > 0;) {
      if (std::isfinite(b.x[i]) && std::isfinite(b.lo[i])) os << num(px(b.x[i])) << ',' << num(py(b.lo[i])) << ' ';
    }
    os << "\"/>\n";
    legend.push_back({b.label, "#9ecae1", true});
  }

  for (std::size_t s = 0; s < chart.lines.size(); ++s) {
    const auto& line = chart.lines[s];
    const std::string color = kPalette[s % std::size(kPalette)];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
           << pts << "\"/>\n";
      }
      pts.clear();
    };
    for (std::size_t i = 0; i < line.x.size(); ++i) {
      if (!std::isfinite(line.x[i]) || !std::isfinite(line.y[i])) {
        flush();
        continue;
      }
      pts += num(px(line.x[i])) + ',' + num(py(line.y[i])) + ' ';
    }
    flush();
    legend.push_back({line.label, color, false});
  }

  double ly = kTop + 14;
  for (const auto& e : legend) {
    const double lx = kLeft + pw - 150;
    if (e.filled) {
      os << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 8) << "\" width=\"20\" height=\"10\" fill=\""
         << e.color << "\" fill-opacity=\"0.5\"/>\n";
    } else {
      os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 3) << "\" x2=\"" << num(lx + 20)
         << "\" y2=\"" << num(ly - 3) << "\" stroke=\"" << e.color << "\" stroke-width=\"2\"/>\n";
    }
    os << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << esc(e.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tvg::app
