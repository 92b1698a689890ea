#include "msdc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace msdc::svg {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) lo -= 0.5, hi += 0.5;
  }
};

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{3}</text>\n",
      kWidth, kHeight, kWidth / 2, escape(title));
}

std::string axes(const Range& xr, const Range& yr, const std::string& xl, const std::string& yl) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string s = fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", x0, y1, x1 - x0,
      y0 - y1);
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 - (y0 - y1) * i / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n",
                     fx, y0 + 16, xr.lo + (xr.hi - xr.lo) * i / 4.0);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n",
                     x0 - 6, fy + 4, yr.lo + (yr.hi - yr.lo) * i / 4.0);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                   (x0 + x1) / 2, kHeight - 12, escape(xl));
  s += fmt::format("<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                   "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                   (y0 + y1) / 2, escape(yl));
  return s;
}

}  // namespace

std::string render(const LinePlot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
  auto py = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

  std::string out = header(plot.title) + axes(xr, yr, plot.x_label, plot.y_label);
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[k]), py(s.y[k]));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(i);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       x1 + 10, ly, x1 + 30, color);
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n", x1 + 35,
                       ly + 4, escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

std::string render_stability_panel(const StabilityGrid& grid, std::size_t it) {
  Range xr, yr;
  for (double a : grid.alpha_values) xr.add(a);
  for (double b : grid.beta_values) yr.add(b);
  xr.finish();
  yr.finish();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double cw = (x1 - x0) / static_cast<double>(grid.alpha_values.size());
  const double ch = (y0 - y1) / static_cast<double>(grid.beta_values.size());

  std::string out = header(fmt::format("stability, tau = {:.4g} s, s = {:.4g} s", grid.tau_values[it], grid.slope_s));
  for (std::size_t ib = 0; ib < grid.beta_values.size(); ++ib) {
    for (std::size_t ia = 0; ia < grid.alpha_values.size(); ++ia) {
      const auto& c = grid.at(ia, ib, it);
      std::string fill = "#999999";
      if (c.status != CellStatus::Error) {
        // Shade by distance from the unit circle.
        const double depth = std::clamp(std::abs(1.0 - c.rho), 0.0, 1.0);
        const int shade = static_cast<int>(230 - 150 * depth);
        fill = c.status == CellStatus::Stable ? fmt::format("rgb({0},{0},255)", shade)
                                              : fmt::format("rgb(255,{0},{0})", shade);
      }
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         x0 + cw * static_cast<double>(ia), y0 - ch * static_cast<double>(ib + 1), cw + 0.3,
                         ch + 0.3, fill);
    }
  }
  out += axes(xr, yr, "alpha = k/M [1/s^2]", "beta = c/M [1/s]");
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"blue\">stable</text>\n",
                     x1 + 10, kTop + 14);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"red\">unstable</text>\n",
                     x1 + 10, kTop + 30);
  out += "</svg>\n";
  return out;
}

}  // namespace msdc::svg
