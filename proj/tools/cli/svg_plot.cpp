#include "cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace phm::cli {
namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string tick_label(double v, double step) {
  int digits = 0;
  if (step < 1.0) digits = std::min(6, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  return fixed(v, digits);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const long first = static_cast<long>(std::ceil(lo / step - 1e-9));
  const long last = static_cast<long>(std::floor(hi / step + 1e-9));
  for (long k = first; k <= last; ++k) ticks.push_back(static_cast<double>(k) * step);
  return ticks;
}

std::string render_svg(const PlotSpec& spec) {
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = 0.0, y1 = -std::numeric_limits<double>::infinity();
  for (const auto& c : spec.curves) {
    for (double v : c.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : c.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const auto yt = nice_ticks(y0, y1);
  y1 = std::max(y1, yt.back());

  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(spec.title) << "</text>\n";

  const auto xt = nice_ticks(x0, x1);
  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xt)
    os << "<line x1=\"" << fixed(sx(t)) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(sx(t)) << "\" y2=\""
       << fixed(top + ph) << "\"/>\n";
  for (double t : yt)
    os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(sy(t)) << "\" x2=\"" << fixed(left + pw) << "\" y2=\""
       << fixed(sy(t)) << "\"/>\n";
  os << "</g>\n";
  os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
     << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : xt)
    os << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(top + ph + 16) << "\" text-anchor=\"middle\">"
       << tick_label(t, xstep) << "</text>\n";
  for (double t : yt)
    os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy(t) + 4) << "\" text-anchor=\"end\">"
       << tick_label(t, ystep) << "</text>\n";
  os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(spec.height - 12.0)
     << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fixed(top + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (double m : spec.markers) {
    if (m < x0 || m > x1) continue;
    os << "<line x1=\"" << fixed(sx(m)) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(sx(m)) << "\" y2=\""
       << fixed(top + ph) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (const auto& c : spec.curves) {
    os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < c.x.size() && i < c.y.size(); ++i) {
      if (!std::isfinite(c.y[i])) continue;
      os << (i ? " " : "") << fixed(sx(c.x[i])) << "," << fixed(sy(c.y[i]));
    }
    os << "\"/>\n";
  }

  // Crossing markers sit on the first curve.
  if (!spec.curves.empty()) {
    const auto& c = spec.curves.front();
    for (double m : spec.markers) {
      if (m < x0 || m > x1 || c.x.size() < 2) continue;
      const auto it = std::lower_bound(c.x.begin(), c.x.end(), m);
      std::size_t j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - c.x.begin(), 1,
                                                                           static_cast<std::ptrdiff_t>(c.x.size()) - 1));
      const double w = (m - c.x[j - 1]) / (c.x[j] - c.x[j - 1]);
      const double y = c.y[j - 1] + w * (c.y[j] - c.y[j - 1]);
      os << "<circle cx=\"" << fixed(sx(m)) << "\" cy=\"" << fixed(sy(y)) << "\" r=\"4\" fill=\"none\" stroke=\"black\""
         << " stroke-width=\"1.5\"/>\n";
    }
  }

  double ly = top + 16;
  for (const auto& c : spec.curves) {
    const double lx = left + pw - 150;
    os << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 24) << "\" y2=\""
       << fixed(ly - 4) << "\" stroke=\"" << c.color << "\" stroke-width=\"1.8\"/>\n";
    os << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly) << "\">" << escape(c.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace phm::cli
