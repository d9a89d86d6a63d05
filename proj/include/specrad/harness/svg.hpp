#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "specrad/harness/experiments.hpp"
#include "specrad/harness/io.hpp"

namespace specrad::harness {

namespace svg {

struct Frame {
  double width = 640, height = 420;
  double left = 70, right = 170, top = 30, bottom = 55;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool log_x = false, log_y = false;

  double tx(double x) const {
    const double a = log_x ? std::log10(x0) : x0, b = log_x ? std::log10(x1) : x1;
    const double v = log_x ? std::log10(x) : x;
    return left + (v - a) / (b - a) * (width - left - right);
  }
  double ty(double y) const {
    const double a = log_y ? std::log10(y0) : y0, b = log_y ? std::log10(y1) : y1;
    const double v = log_y ? std::log10(y) : y;
    return height - bottom - (v - a) / (b - a) * (height - top - bottom);
  }
};

inline std::string num(double v) { return format_g(v, 6); }

inline void open(std::ostringstream& s, const Frame& f, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << f.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  s << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width - f.left - f.right << "\" height=\""
    << f.height - f.top - f.bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

inline void x_tick(std::ostringstream& s, const Frame& f, double x, const std::string& label) {
  const double px = f.tx(x), py = f.height - f.bottom;
  s << "<line x1=\"" << num(px) << "\" y1=\"" << num(py) << "\" x2=\"" << num(px) << "\" y2=\"" << num(py + 4)
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num(px) << "\" y=\"" << num(py + 16) << "\" text-anchor=\"middle\">" << label << "</text>\n";
}

inline void y_tick(std::ostringstream& s, const Frame& f, double y, const std::string& label) {
  const double px = f.left, py = f.ty(y);
  s << "<line x1=\"" << num(px - 4) << "\" y1=\"" << num(py) << "\" x2=\"" << num(f.width - f.right) << "\" y2=\""
    << num(py) << "\" stroke=\"#dddddd\"/>\n";
  s << "<text x=\"" << num(px - 7) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << label << "</text>\n";
}

inline void axis_labels(std::ostringstream& s, const Frame& f, const std::string& xl, const std::string& yl) {
  s << "<text x=\"" << num(f.left + (f.width - f.left - f.right) / 2) << "\" y=\"" << num(f.height - 15)
    << "\" text-anchor=\"middle\">" << xl << "</text>\n";
  s << "<text transform=\"translate(16," << num(f.top + (f.height - f.top - f.bottom) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << yl << "</text>\n";
}

inline void polyline(std::ostringstream& s, const Frame& f, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& color, const std::string& dash = "") {
  s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
  if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
  s << " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? " " : "") << num(f.tx(xs[i])) << ',' << num(f.ty(ys[i]));
  s << "\"/>\n";
}

inline void band(std::ostringstream& s, const Frame& f, const std::vector<double>& xs, const std::vector<double>& lo,
                 const std::vector<double>& hi, const std::string& color) {
  s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) s << num(f.tx(xs[i])) << ',' << num(f.ty(hi[i])) << ' ';
  for (std::size_t i = xs.size(); i-- > 0;) s << num(f.tx(xs[i])) << ',' << num(f.ty(lo[i])) << ' ';
  s << "\"/>\n";
}

inline void legend(std::ostringstream& s, const Frame& f, int row, const std::string& color, const std::string& label,
                   const std::string& dash = "") {
  const double x = f.width - f.right + 12, y = f.top + 12 + 18 * row;
  s << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 22) << "\" y2=\"" << num(y)
    << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
  if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
  s << "/>\n<text x=\"" << num(x + 28) << "\" y=\"" << num(y + 4) << "\">" << label << "</text>\n";
}

}  // namespace svg

/// Errors and bounds versus N on a log y axis: medians as lines, first to
/// third quartile as shaded bands.
inline std::string fig1_svg(const std::vector<Fig1Summary>& summary) {
  svg::Frame f;
  f.log_y = true;
  f.x0 = static_cast<double>(summary.front().trajectories);
  f.x1 = static_cast<double>(summary.back().trajectories);
  if (f.x1 == f.x0) f.x1 = f.x0 + 1;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& s : summary) {
    for (const Quartiles* q : {&s.err_alg1, &s.bound_f2, &s.err_alg2, &s.bound_f4}) {
      if (q->q1 > 0.0 && std::isfinite(q->q1)) lo = std::min(lo, q->q1);
      if (std::isfinite(q->q3)) hi = std::max(hi, q->q3);
    }
  }
  if (!(lo < hi)) {
    lo = 1e-3;
    hi = 1.0;
  }
  f.y0 = std::pow(10.0, std::floor(std::log10(lo)));
  f.y1 = std::pow(10.0, std::ceil(std::log10(hi)));

  std::ostringstream s;
  svg::open(s, f, "Spectral-radius error and bounds (median, IQR)");
  for (double d = f.y0; d <= f.y1 * 1.0001; d *= 10.0) svg::y_tick(s, f, d, svg::num(d));
  for (const auto& sm : summary) {
    svg::x_tick(s, f, static_cast<double>(sm.trajectories), std::to_string(sm.trajectories));
  }
  svg::axis_labels(s, f, "number of trajectories N", "|rho(A) - rho(A_hat)|");

  struct Series {
    const char* label;
    const char* color;
    const char* dash;
    Quartiles Fig1Summary::*field;
  };
  const Series series[] = {{"error, all data", "#1f77b4", "", &Fig1Summary::err_alg1},
                           {"bound f2", "#1f77b4", "6,3", &Fig1Summary::bound_f2},
                           {"error, last samples", "#d62728", "", &Fig1Summary::err_alg2},
                           {"bound f4", "#d62728", "6,3", &Fig1Summary::bound_f4}};
  int row = 0;
  for (const auto& se : series) {
    std::vector<double> xs, q1, med, q3;
    for (const auto& sm : summary) {
      const Quartiles& q = sm.*(se.field);
      if (!(q.q1 > 0.0) || !std::isfinite(q.q3)) continue;
      xs.push_back(static_cast<double>(sm.trajectories));
      q1.push_back(std::max(q.q1, f.y0));
      med.push_back(std::max(q.median, f.y0));
      q3.push_back(std::min(q.q3, f.y1));
    }
    if (!xs.empty()) {
      svg::band(s, f, xs, q1, q3, se.color);
      svg::polyline(s, f, xs, med, se.color, se.dash);
    }
    svg::legend(s, f, row++, se.color, se.label, se.dash);
  }
  s << "</svg>\n";
  return s.str();
}

/// TSPP and ESPR versus N_q on a log x axis.
inline std::string fig2_svg(const Fig2Result& res) {
  svg::Frame f;
  f.log_x = true;
  f.x0 = static_cast<double>(res.points.front().n_samples);
  f.x1 = static_cast<double>(res.points.back().n_samples);
  if (f.x1 <= f.x0) f.x1 = f.x0 * 10.0;
  f.y0 = 0.0;
  f.y1 = 1.05;

  std::ostringstream s;
  svg::open(s, f, "Stabilizability test: TSPP vs ESPR");
  for (int k = 0; k <= 5; ++k) svg::y_tick(s, f, 0.2 * k, svg::num(0.2 * k));
  for (double d = std::pow(10.0, std::ceil(std::log10(f.x0))); d <= f.x1 * 1.0001; d *= 10.0) {
    svg::x_tick(s, f, d, svg::num(d));
  }
  svg::axis_labels(s, f, "channel samples N_q", "probability");
  std::vector<double> xs, espr, tspp;
  for (const auto& p : res.points) {
    xs.push_back(static_cast<double>(p.n_samples));
    espr.push_back(p.espr);
    tspp.push_back(p.tspp);
  }
  svg::polyline(s, f, xs, espr, "#1f77b4");
  svg::polyline(s, f, xs, tspp, "#d62728", "6,3");
  svg::legend(s, f, 0, "#1f77b4", "ESPR");
  svg::legend(s, f, 1, "#d62728", "TSPP", "6,3");
  s << "</svg>\n";
  return s.str();
}

}  // namespace specrad::harness
