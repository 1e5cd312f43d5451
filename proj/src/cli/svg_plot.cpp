#include "gamo/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "gamo/error.hpp"

namespace gamo::cli {

namespace {

constexpr double kWidth = 600.0;
constexpr double kHeight = 600.0;
constexpr double kTop = 30.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
constexpr const char* kMajority = "#555555";

const char* color(int cls, std::size_t classes) {
  if (static_cast<std::size_t>(cls) + 1 == classes) return kMajority;
  return kPalette[static_cast<std::size_t>(cls) % std::size(kPalette)];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double px(const PlotBounds& b, double x) { return (x - b.x0) / (b.x1 - b.x0) * kWidth; }
double py(const PlotBounds& b, double y) { return kTop + (b.y1 - y) / (b.y1 - b.y0) * kHeight; }

}  // namespace

PlotBounds bounds_of(std::span<const diff::Tensor* const> sets, double pad) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (const auto* t : sets) {
    if (!t || t->size() == 0) continue;
    if (t->cols() != 2) throw ShapeError("plots need 2-D points");
    for (std::size_t r = 0; r < t->rows(); ++r) {
      lo_x = std::min(lo_x, (*t)(r, 0));
      hi_x = std::max(hi_x, (*t)(r, 0));
      lo_y = std::min(lo_y, (*t)(r, 1));
      hi_y = std::max(hi_y, (*t)(r, 1));
    }
  }
  if (!std::isfinite(lo_x)) return {};
  const double wx = std::max(hi_x - lo_x, 1e-6), wy = std::max(hi_y - lo_y, 1e-6);
  return {lo_x - pad * wx, hi_x + pad * wx, lo_y - pad * wy, hi_y + pad * wy};
}

std::array<double, 2> grid_point(const PlotBounds& b, std::size_t n, std::size_t row, std::size_t col) {
  const double step_x = (b.x1 - b.x0) / static_cast<double>(n);
  const double step_y = (b.y1 - b.y0) / static_cast<double>(n);
  return {b.x0 + (static_cast<double>(col) + 0.5) * step_x, b.y1 - (static_cast<double>(row) + 0.5) * step_y};
}

std::vector<int> decision_grid(const model::GamoModel& m, const PlotBounds& b, std::size_t n) {
  if (m.config().input_dim != 2) throw ConfigError("decision regions need a 2-D input");
  diff::Tensor pts = diff::Tensor::matrix(n * n, 2);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto p = grid_point(b, n, r, c);
      pts(r * n + c, 0) = p[0];
      pts(r * n + c, 1) = p[1];
    }
  }
  return m.predict(pts);
}

void write_svg(std::ostream& out, const ScatterPlot& plot) {
  const auto& b = plot.bounds;
  const std::size_t n = plot.grid;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight + kTop)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight + kTop) << "\">\n";
  out << "<title>" << escape(plot.title) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight + kTop)
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"8\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape(plot.title) << "</text>\n";

  // decision regions, one rect per run of equal cells in a grid row
  if (plot.regions.size() == n * n && n > 0) {
    const double cw = kWidth / static_cast<double>(n), ch = kHeight / static_cast<double>(n);
    out << "<g id=\"regions\" fill-opacity=\"0.22\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t c = 0;
      while (c < n) {
        const int cls = plot.regions[r * n + c];
        std::size_t e = c + 1;
        while (e < n && plot.regions[r * n + e] == cls) ++e;
        out << "<rect x=\"" << num(static_cast<double>(c) * cw) << "\" y=\"" << num(kTop + static_cast<double>(r) * ch)
            << "\" width=\"" << num(static_cast<double>(e - c) * cw) << "\" height=\"" << num(ch) << "\" fill=\""
            << color(cls, plot.classes) << "\"/>\n";
        c = e;
      }
    }
    out << "</g>\n";
  }

  out << "<g id=\"real\" stroke=\"none\">\n";
  for (std::size_t r = 0; r < plot.real.rows(); ++r) {
    const int cls = plot.real_labels[r];
    const bool major = static_cast<std::size_t>(cls) + 1 == plot.classes;
    out << "<circle cx=\"" << num(px(b, plot.real(r, 0))) << "\" cy=\"" << num(py(b, plot.real(r, 1))) << "\" r=\""
        << (major ? "1.8" : "3") << "\" fill=\"" << color(cls, plot.classes) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"synthetic\" fill=\"none\" stroke-width=\"1.2\">\n";
  for (std::size_t r = 0; r < plot.synthetic.rows(); ++r) {
    const double x = px(b, plot.synthetic(r, 0)), y = py(b, plot.synthetic(r, 1));
    const char* col = color(plot.synthetic_labels[r], plot.classes);
    out << "<path d=\"M" << num(x - 3) << ' ' << num(y - 3) << "L" << num(x + 3) << ' ' << num(y + 3) << "M"
        << num(x - 3) << ' ' << num(y + 3) << "L" << num(x + 3) << ' ' << num(y - 3) << "\" stroke=\"" << col
        << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<circle cx=\"" << num(kWidth - 150) << "\" cy=\"16\" r=\"3\" fill=\"" << kPalette[0] << "\"/>"
      << "<text x=\"" << num(kWidth - 143) << "\" y=\"20\">minority</text>\n";
  out << "<path d=\"M" << num(kWidth - 83) << " 13L" << num(kWidth - 77) << " 19M" << num(kWidth - 83) << " 19L"
      << num(kWidth - 77) << " 13\" stroke=\"" << kPalette[0] << "\" fill=\"none\"/>"
      << "<text x=\"" << num(kWidth - 72) << "\" y=\"20\">synthetic</text>\n";
  out << "</g>\n";
  out << "</svg>\n";
}

}  // namespace gamo::cli
