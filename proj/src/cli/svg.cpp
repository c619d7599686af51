#include "lipwalk/cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace lipwalk::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 320.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  Range padded() const {
    if (!(lo <= hi)) return {0.0, 1.0};
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : std::max(1e-3, 0.05 * std::abs(lo));
    return {lo - pad, hi + pad};
  }
};

class Panel {
 public:
  Panel(double top, Range x, Range y) : top_(top), x_(x.padded()), y_(y.padded()) {}

  double px(double x) const { return kMarginLeft + (x - x_.lo) / (x_.hi - x_.lo) * inner_w(); }
  double py(double y) const { return top_ + kMarginTop + (y_.hi - y) / (y_.hi - y_.lo) * inner_h(); }

  void frame(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel) const {
    const double left = kMarginLeft;
    const double top = top_ + kMarginTop;
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(inner_w()) << "\" height=\""
       << fmt(inner_h()) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(top - 10.0) << "\" font-size=\"14\">" << title << "</text>\n";
    os << "<text x=\"" << fmt(left + inner_w() / 2.0) << "\" y=\"" << fmt(top + inner_h() + 32.0)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"14\" y=\"" << fmt(top + inner_h() / 2.0) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << fmt(top + inner_h() / 2.0) << ")\">" << ylabel << "</text>\n";
    tick_labels(os);
  }

  void polyline(std::ostream& os, const std::vector<std::pair<double, double>>& pts, const char* color,
                double width, const char* extra = "") const {
    if (pts.empty()) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(width) << "\"" << extra
       << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) os << ' ';
      os << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
    }
    os << "\"/>\n";
  }

  void dot(std::ostream& os, double x, double y, const char* color, double r = 3.0) const {
    os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << fmt(r) << "\" fill=\"" << color
       << "\"/>\n";
  }

 private:
  static double inner_w() { return kWidth - kMarginLeft - kMarginRight; }
  static double inner_h() { return kPanelHeight - kMarginTop - kMarginBottom; }

  void tick_labels(std::ostream& os) const {
    const double bottom = top_ + kMarginTop + inner_h();
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(bottom + 14.0) << "\" font-size=\"10\" text-anchor=\"middle\">"
         << label(xv) << "</text>\n";
      os << "<text x=\"" << fmt(kMarginLeft - 4.0) << "\" y=\"" << fmt(py(yv) + 3.0)
         << "\" font-size=\"10\" text-anchor=\"end\">" << label(yv) << "</text>\n";
    }
  }

  double top_;
  Range x_;
  Range y_;
};

void open_svg(std::ostream& os, double height) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(height)
     << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

void close_svg(std::ostream& os) { os << "</svg>\n"; }

}  // namespace

std::string render_com_figure(std::span<const Sample> samples) {
  Range t, pos, vel;
  std::vector<std::pair<double, double>> com, cop, speed;
  for (const Sample& s : samples) {
    t.add(s.t);
    pos.add(s.x_world);
    pos.add(s.cop_world);
    vel.add(s.xdot);
    com.emplace_back(s.t, s.x_world);
    speed.emplace_back(s.t, s.xdot);
    // COP is piecewise constant; draw it as a staircase.
    if (!cop.empty() && cop.back().second != s.cop_world) cop.emplace_back(s.t, cop.back().second);
    cop.emplace_back(s.t, s.cop_world);
  }

  std::ostringstream os;
  open_svg(os, 2.0 * kPanelHeight);
  const Panel top(0.0, t, pos);
  top.frame(os, "COM and COP position (world frame)", "t [s]", "x [m]");
  top.polyline(os, cop, "#7f7f7f", 1.0, " stroke-dasharray=\"4 3\"");
  top.polyline(os, com, kPalette[0], 1.5);
  const Panel bottom(kPanelHeight, t, vel);
  bottom.frame(os, "COM velocity", "t [s]", "xdot [m/s]");
  bottom.polyline(os, speed, kPalette[1], 1.5);
  close_svg(os);
  return os.str();
}

std::string render_phase_figure(std::span<const StepRecord> steps, std::span<const Sample> samples) {
  const PhasePortrait portrait = phase_portrait(steps, samples);
  Range x, v;
  for (const PhasePoint& p : portrait.points) {
    x.add(p.x);
    v.add(p.xdot);
  }

  std::ostringstream os;
  open_svg(os, kPanelHeight);
  const Panel panel(0.0, x, v);
  panel.frame(os, "Phase portrait", "x = x_COM - x_COP [m]", "xdot [m/s]");
  for (std::size_t j = 0; j < portrait.step_begin.size(); ++j) {
    const std::size_t begin = portrait.step_begin[j];
    const std::size_t end = portrait.reset_indices[j];
    std::vector<std::pair<double, double>> flow;
    for (std::size_t k = begin; k <= end; ++k) flow.emplace_back(portrait.points[k].x, portrait.points[k].xdot);
    const bool cycle = j + 1 == portrait.step_begin.size();
    panel.polyline(os, flow, cycle ? "#000" : kPalette[0], cycle ? 3.0 : 1.5);
    if (end + 1 < portrait.points.size()) {
      const PhasePoint& a = portrait.points[end];
      const PhasePoint& b = portrait.points[end + 1];
      panel.polyline(os, {{a.x, a.xdot}, {b.x, b.xdot}}, "#7f7f7f", cycle ? 3.0 : 1.0);
    }
    panel.dot(os, portrait.points[begin].x, portrait.points[begin].xdot, "#000");
  }
  close_svg(os);
  return os.str();
}

std::string render_step_length_figure(std::span<const StepLengthRow> rows) {
  std::map<double, std::vector<std::pair<double, double>>> series;
  Range idx, len;
  for (const StepLengthRow& r : rows) {
    series[r.R].emplace_back(r.index, r.L_applied);
    idx.add(r.index);
    len.add(r.L_applied);
  }

  std::ostringstream os;
  open_svg(os, kPanelHeight);
  const Panel panel(0.0, idx, len);
  panel.frame(os, "Step length per step", "step index", "L [m]");
  std::size_t color = 0;
  double legend_y = kMarginTop + 14.0;
  for (const auto& [R, pts] : series) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    panel.polyline(os, pts, c, 1.5);
    for (const auto& [i, L] : pts) panel.dot(os, i, L, c);
    os << "<text x=\"" << fmt(kWidth - kMarginRight - 10.0) << "\" y=\"" << fmt(legend_y)
       << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << c << "\">R = " << label(R) << "</text>\n";
    legend_y += 16.0;
  }
  close_svg(os);
  return os.str();
}

}  // namespace lipwalk::cli
