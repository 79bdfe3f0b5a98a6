#include "ecglab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace ecglab {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 72, kRight = 160, kTop = 40, kBottom = 56;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (hi - lo < 1e-12) {
      const double d = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= d;
      hi += d;
    }
  }
};

bool drawable(const LinePlot& plot, double x, double y) {
  return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0.0);
}

std::vector<double> linear_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int i = 0; i <= 4; ++i) ticks.push_back(lo + (hi - lo) * i / 4.0);
  return ticks;
}

}  // namespace

void write_svg(std::ostream& out, const LinePlot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("plot series with mismatched x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!drawable(plot, s.x[i], s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(plot.log_y ? std::log10(s.y[i]) : s.y[i]);
    }
  }
  if (xr.empty()) throw std::invalid_argument(fmt::format("plot '{}' has no drawable points", plot.title));
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) {
    const double t = plot.log_y ? std::log10(y) : y;
    return kTop + ph - (t - yr.lo) / (yr.hi - yr.lo) * ph;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out << fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + pw / 2, escape(plot.title));
  out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, pw, ph);

  for (double t : linear_ticks(xr.lo, xr.hi)) {
    const double px = sx(t);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", px,
                       kTop + ph, kTop + ph + 5);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.4g}</text>\n", px, kTop + ph + 18, t);
  }
  for (double t : linear_ticks(yr.lo, yr.hi)) {
    const double value = plot.log_y ? std::pow(10.0, t) : t;
    const double py = sy(value);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n",
                       kLeft, py, kLeft + pw);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6, py + 4,
                       value);
  }
  out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                     kHeight - 16, escape(plot.x_label));
  out << fmt::format(
      "<text x=\"16\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.1f})\">{1}{2}</text>\n",
      kTop + ph / 2, escape(plot.y_label), plot.log_y ? " (log scale)" : "");

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    double last_y = 0;
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!drawable(plot, s.x[i], s.y[i])) continue;
      if (s.step && !first) points += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), last_y);
      last_y = sy(s.y[i]);
      points += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), last_y);
      first = false;
    }
    if (!points.empty()) {
      points.pop_back();
      out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, points);
    }
    if (!s.step) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (drawable(plot, s.x[i], s.y[i]))
          out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", sx(s.x[i]), sy(s.y[i]),
                             color);
    }
    const double ly = kTop + 12 + 18 * static_cast<double>(k);
    out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
                       "stroke-width=\"2\"/>\n",
                       kLeft + pw + 10, ly, kLeft + pw + 30, color);
    out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + pw + 36, ly + 4, escape(s.label));
  }
  out << "</svg>\n";
}

void write_svg_file(const std::filesystem::path& path, const LinePlot& plot) {
  std::ostringstream buffer;
  write_svg(buffer, plot);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  file << buffer.str();
}

}  // namespace ecglab
