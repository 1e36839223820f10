#include "groklab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "groklab/io.hpp"

namespace grok {

std::string xml_escape(const std::string& s) {
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

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double t(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h == l ? 0.5 : (a - l) / (h - l);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis fit_axis(const std::vector<const Vector*>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Vector* v : values)
    for (double x : *v)
      if (a.usable(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
  if (!std::isfinite(lo)) lo = log ? 1.0 : 0.0, hi = log ? 10.0 : 1.0;
  if (lo == hi) {
    if (log) lo /= 2, hi *= 2;
    else lo -= 0.5, hi += 0.5;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

struct Frame {
  ChartSpec spec;
  Axis x, y;
  double left = 70, right = 20, top = 40, bottom = 55;

  double px(double v) const { return left + x.t(v) * (spec.width - left - right); }
  double py(double v) const { return spec.height - bottom - y.t(v) * (spec.height - top - bottom); }
};

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    for (double e = std::floor(std::log10(a.lo)); e <= std::ceil(std::log10(a.hi)); e += 1.0) {
      const double v = std::pow(10.0, e);
      if (v >= a.lo * (1 - 1e-9) && v <= a.hi * (1 + 1e-9)) out.push_back(v);
    }
    if (out.size() < 2) out = {a.lo, a.hi};
    return out;
  }
  for (int i = 0; i <= 5; ++i) out.push_back(a.lo + (a.hi - a.lo) * i / 5.0);
  return out;
}

void open(std::ostringstream& s, const Frame& f) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.spec.width << "\" height=\"" << f.spec.height
    << "\" viewBox=\"0 0 " << f.spec.width << ' ' << f.spec.height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << f.spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << xml_escape(f.spec.title) << "</text>\n";
}

void axes(std::ostringstream& s, const Frame& f) {
  const double x0 = f.left, x1 = f.spec.width - f.right, y0 = f.spec.height - f.bottom, y1 = f.top;
  s << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
    << "\"/><line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/></g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v : ticks(f.x))
    s << "<text x=\"" << fmt(f.px(v)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << tick_label(v)
      << "</text>\n";
  for (double v : ticks(f.y))
    s << "<text x=\"" << x0 - 6 << "\" y=\"" << fmt(f.py(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
      << "</text>\n";
  s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << f.spec.height - 12 << "\" text-anchor=\"middle\">"
    << xml_escape(f.spec.x_label) << "</text>\n";
  s << "<text transform=\"translate(16," << (y0 + y1) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(f.spec.y_label) << "</text>\n</g>\n";
}

void legend(std::ostringstream& s, const Frame& f, const std::vector<std::string>& labels) {
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = f.top + 8 + 15.0 * static_cast<double>(i);
    const double x = f.spec.width - f.right - 150;
    s << "<rect x=\"" << x << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[i % 8]
      << "\"/><text x=\"" << x + 14 << "\" y=\"" << y + 1 << "\">" << xml_escape(labels[i]) << "</text>\n";
  }
  s << "</g>\n";
}

void polyline(std::ostringstream& s, const Frame& f, const Series& ser, const char* colour, double width = 1.5) {
  std::string pts;
  for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
    if (!f.x.usable(ser.x[i]) || !f.y.usable(ser.y[i])) continue;
    pts += fmt(f.px(ser.x[i])) + ',' + fmt(f.py(ser.y[i])) + ' ';
  }
  if (pts.empty()) return;
  pts.pop_back();
  s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << width << "\" points=\"" << pts
    << "\"/>\n";
}

std::vector<const Vector*> xs_of(const std::vector<Series>& a, const std::vector<Series>& b, bool want_x) {
  std::vector<const Vector*> out;
  for (const auto* v : {&a, &b})
    for (const auto& s : *v) out.push_back(want_x ? &s.x : &s.y);
  return out;
}

}  // namespace

std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
  return scatter_chart(spec, {}, series);
}

std::string scatter_chart(const ChartSpec& spec, const std::vector<Series>& points, const std::vector<Series>& curves) {
  Frame f{spec, fit_axis(xs_of(points, curves, true), spec.log_x), fit_axis(xs_of(points, curves, false), spec.log_y)};
  std::ostringstream s;
  open(s, f);
  axes(s, f);
  std::vector<std::string> labels;
  std::size_t c = 0;
  for (const auto& p : points) {
    const char* colour = kPalette[c++ % 8];
    labels.push_back(p.label);
    s << "<g fill=\"" << colour << "\">\n";
    for (std::size_t i = 0; i < std::min(p.x.size(), p.y.size()); ++i)
      if (f.x.usable(p.x[i]) && f.y.usable(p.y[i]))
        s << "<circle cx=\"" << fmt(f.px(p.x[i])) << "\" cy=\"" << fmt(f.py(p.y[i])) << "\" r=\"3\"/>\n";
    s << "</g>\n";
  }
  for (const auto& cv : curves) {
    labels.push_back(cv.label);
    polyline(s, f, cv, kPalette[c++ % 8]);
  }
  legend(s, f, labels);
  s << "</svg>\n";
  return s.str();
}

std::string heatmap_chart(const ChartSpec& spec, const Vector& x, const Vector& y, const Matrix& z,
                          const std::vector<Series>& overlays) {
  ChartSpec sp = spec;
  sp.log_x = sp.log_y = true;
  Frame f{sp, fit_axis({&x}, true), fit_axis({&y}, true)};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : z.data())
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  std::ostringstream s;
  open(s, f);
  // Cell edges at geometric midpoints between grid values.
  auto edges = [](const Vector& g) {
    Vector e(g.size() + 1);
    for (std::size_t i = 1; i < g.size(); ++i) e[i] = std::sqrt(g[i - 1] * g[i]);
    e[0] = g.size() > 1 ? g[0] * g[0] / e[1] : g[0] / 1.5;
    e[g.size()] = g.size() > 1 ? g.back() * g.back() / e[g.size() - 1] : g[0] * 1.5;
    return e;
  };
  const Vector ex = edges(x), ey = edges(y);
  f.x.lo = ex.front();
  f.x.hi = ex.back();
  f.y.lo = ey.front();
  f.y.hi = ey.back();
  s << "<g stroke=\"none\">\n";
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = z(i, j);
      const double t = std::isfinite(v) && hi > lo ? (v - lo) / (hi - lo) : 0.0;
      const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
      const double x0 = f.px(ex[j]), x1 = f.px(ex[j + 1]), y0 = f.py(ey[i + 1]), y1 = f.py(ey[i]);
      char colour[8];
      std::snprintf(colour, sizeof colour, "#%02x%02x%02x", r, 64, b);
      s << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0 + 0.3) << "\" height=\""
        << fmt(y1 - y0 + 0.3) << "\" fill=\"" << colour << "\"/>\n";
    }
  s << "</g>\n";
  axes(s, f);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < overlays.size(); ++k) {
    labels.push_back(overlays[k].label);
    polyline(s, f, overlays[k], k < 8 ? kPalette[(k + 2) % 8] : "white", 2.0);
  }
  legend(s, f, labels);
  s << "<text x=\"" << f.left << "\" y=\"" << f.top - 6 << "\" font-family=\"sans-serif\" font-size=\"10\">colour: "
    << xml_escape(format_double(lo)) << " (blue) to " << xml_escape(format_double(hi)) << " (red)</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace grok
