#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alloylab {

// Minimal static SVG scatter/line plots; no display dependency, deterministic
// output. Log axes are applied to the data before layout.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void set_log_axes(bool log_x, bool log_y);
  void set_provenance(const std::string& config_hash, std::uint64_t seed);
  void add_series(const std::string& label, std::vector<double> x, std::vector<double> y,
                  const std::string& color, bool line);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string color;
    bool line = false;
  };
  std::string title_, xlabel_, ylabel_;
  bool log_x_ = false, log_y_ = false;
  std::string provenance_;
  std::vector<Series> series_;
};

}  // namespace alloylab
