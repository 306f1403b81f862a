#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <edlab/csv.hpp>
#include <edlab/errors.hpp>

namespace edlab {

// Minimal self-contained SVG line plots with optional log axes.
struct PlotSeries {
  std::vector<double> x, y;
  std::string color = "#1f6fb2";
  std::string label;
};

class LinePlot {
 public:
  LinePlot(std::string title, std::string xlabel, std::string ylabel,
           bool log_x = false, bool log_y = false)
      : title_(std::move(title)),
        xlabel_(std::move(xlabel)),
        ylabel_(std::move(ylabel)),
        log_x_(log_x),
        log_y_(log_y) {}

  void add(PlotSeries s) { series_.push_back(std::move(s)); }

  void write(const std::filesystem::path& path) const {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double xv = tx(s.x[i]), yv = ty(s.y[i]);
        if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
        xmin = std::min(xmin, xv);
        xmax = std::max(xmax, xv);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (ymin > ymax) ymin = 0, ymax = 1;
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymax = ymin + 1;

    auto px = [&](double x) { return ml + (tx(x) - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (ty(y) - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
        << "\" height=\"" << height - mt - mb
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // ticks: decades on log axes, 5 divisions otherwise
    auto tick_vals = [&](double lo, double hi, bool logscale) {
      std::vector<double> v;
      if (logscale) {
        for (int d = static_cast<int>(std::ceil(lo - 1e-9));
             d <= static_cast<int>(std::floor(hi + 1e-9)); ++d)
          v.push_back(static_cast<double>(d));
        if (v.size() > 12) {
          std::vector<double> thin;
          const int stride = static_cast<int>(v.size() + 11) / 12;
          for (std::size_t i = 0; i < v.size(); i += stride) thin.push_back(v[i]);
          v = thin;
        }
      } else {
        for (int i = 0; i <= 5; ++i) v.push_back(lo + (hi - lo) * i / 5.0);
      }
      return v;
    };
    for (double v : tick_vals(xmin, xmax, log_x_)) {
      const double x = ml + (v - xmin) / (xmax - xmin) * (width - ml - mr);
      out << "<line x1=\"" << x << "\" y1=\"" << height - mb << "\" x2=\"" << x
          << "\" y2=\"" << height - mb + 5 << "\" stroke=\"#444\"/>\n";
      out << "<text x=\"" << x << "\" y=\"" << height - mb + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << (log_x_ ? "1e" + fmt_g(v) : fmt_g(v)) << "</text>\n";
    }
    for (double v : tick_vals(ymin, ymax, log_y_)) {
      const double y = height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
      out << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml
          << "\" y2=\"" << y << "\" stroke=\"#444\"/>\n";
      out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << (log_y_ ? "1e" + fmt_g(v) : fmt_g(v)) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xlabel_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << (mt + height - mb) / 2 << ")\">"
        << ylabel_ << "</text>\n";

    int legend_row = 0;
    for (const auto& s : series_) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double xv = tx(s.x[i]), yv = ty(s.y[i]);
        if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
        out << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      out << "\"/>\n";
      if (!s.label.empty()) {
        const double ly = mt + 16 + 16 * legend_row++;
        out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly
            << "\" x2=\"" << width - mr - 125 << "\" y2=\"" << ly
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr - 120 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
            << "</text>\n";
      }
    }
    out << "</svg>\n";
  }

 private:
  double tx(double x) const { return log_x_ ? std::log10(x) : x; }
  double ty(double y) const { return log_y_ ? std::log10(y) : y; }

  std::string title_, xlabel_, ylabel_;
  bool log_x_, log_y_;
  std::vector<PlotSeries> series_;
};

}  // namespace edlab
