#include "bimanual/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace bimanual {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 46;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// round the raw span to a 1/2/5 tick spacing
double tick_step(double span) {
  if (span <= 0.0) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2.0 * mag;
  if (r < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

}  // namespace

void write_svg_line_chart(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
  double x_min = std::numeric_limits<double>::max(), x_max = std::numeric_limits<double>::lowest();
  double y_min = x_min, y_max = x_max;
  for (const auto& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_min > x_max) throw std::invalid_argument("write_svg_line_chart: no data");
  if (y_min == y_max) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  const double x_step = tick_step(x_max - x_min);
  for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + 1e-12; t += x_step) {
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << kMarginTop << "\" x2=\"" << num(sx(t))
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"#e5e5e5\"/>\n"
        << "<text x=\"" << num(sx(t)) << "\" y=\"" << kMarginTop + plot_h + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
        << "</text>\n";
  }
  const double y_step = tick_step(y_max - y_min);
  for (double t = std::ceil(y_min / y_step) * y_step; t <= y_max + 1e-12; t += y_step) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(sy(t)) << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << num(sy(t)) << "\" stroke=\"#e5e5e5\"/>\n"
        << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(sy(t) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
        << "</text>\n";
  }
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n"
      << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n"
      << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2 << ")\">" << y_label
      << "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("write_svg_line_chart: series size mismatch");
    // thin dense series so files stay small
    const size_t stride = std::max<size_t>(1, s.x.size() / 2000);
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 6]
        << "\" stroke-width=\"1.4\" points=\"";
    for (size_t k = 0; k < s.x.size(); k += stride)
      out << num(sx(s.x[k])) << ',' << num(sy(s.y[k])) << ' ';
    if (!s.x.empty() && (s.x.size() - 1) % stride != 0)
      out << num(sx(s.x.back())) << ',' << num(sy(s.y.back()));
    out << "\"/>\n";
    const int lx = kMarginLeft + 10;
    const int ly = kMarginTop + 14 + static_cast<int>(i) * 16;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 18 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << kPalette[i % 6] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 24 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bimanual
