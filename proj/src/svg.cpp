#include "alloylab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "alloylab/csv.hpp"

namespace alloylab {

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::set_log_axes(bool log_x, bool log_y) {
  log_x_ = log_x;
  log_y_ = log_y;
}

void SvgPlot::set_provenance(const std::string& config_hash, std::uint64_t seed) {
  provenance_ = "config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

void SvgPlot::add_series(const std::string& label, std::vector<double> x, std::vector<double> y,
                         const std::string& color, bool line) {
  series_.push_back({label, std::move(x), std::move(y), color, line});
}

std::string SvgPlot::render() const {
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;

  auto tx = [&](double v) { return log_x_ ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y_ ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_x_ && s.x[i] <= 0.0) continue;
      if (log_y_ && s.y[i] <= 0.0) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  if (xmin > xmax) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (ymin > ymax) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double v) { return height - mb - (ty(v) - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  out += "<desc>" + provenance_ + "</desc>\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title_ + "</text>\n";
  out += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-size=\"12\">" + xlabel_ +
         (log_x_ ? " (log)" : "") + "</text>\n";
  out += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" "
         "transform=\"rotate(-90 16 240)\">" + ylabel_ + (log_y_ ? " (log)" : "") + "</text>\n";
  out += "<rect x=\"" + format_double(ml) + "\" y=\"" + format_double(mt) + "\" width=\"" +
         format_double(width - ml - mr) + "\" height=\"" + format_double(height - mt - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  // axis ticks
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double sx = ml + (width - ml - mr) * i / 4.0;
    const double sy = height - mb - (height - mt - mb) * i / 4.0;
    out += "<text x=\"" + format_double(sx) + "\" y=\"" + format_double(height - mb + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\">" +
           format_double(log_x_ ? std::pow(10.0, fx) : fx) + "</text>\n";
    out += "<text x=\"" + format_double(ml - 6) + "\" y=\"" + format_double(sy + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" +
           format_double(log_y_ ? std::pow(10.0, fy) : fy) + "</text>\n";
  }

  int legend = 0;
  for (const auto& s : series_) {
    if (s.line) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if ((log_x_ && s.x[i] <= 0.0) || (log_y_ && s.y[i] <= 0.0)) continue;
        pts += format_double(px(s.x[i])) + "," + format_double(py(s.y[i])) + " ";
      }
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"" + pts + "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if ((log_x_ && s.x[i] <= 0.0) || (log_y_ && s.y[i] <= 0.0)) continue;
        out += "<circle cx=\"" + format_double(px(s.x[i])) + "\" cy=\"" +
               format_double(py(s.y[i])) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
      }
    }
    out += "<text x=\"" + format_double(width - mr - 8) + "\" y=\"" +
           format_double(mt + 14 + 14 * legend) + "\" text-anchor=\"end\" font-size=\"11\" fill=\"" +
           s.color + "\">" + s.label + "</text>\n";
    ++legend;
  }
  out += "</svg>\n";
  return out;
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << render();
}

}  // namespace alloylab
