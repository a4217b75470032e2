#pragma once

#include <span>
#include <string>
#include <vector>

namespace nonstat {

// Deterministic SVG 1.1 renderer: fixed 800x500 canvas, no timestamps,
// %.6g-style coordinates. Enough for the figure-level outputs (traces with
// prediction bands, parameter fans, decay plots, survivor cells).
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void set_range(double x_lo, double x_hi, double y_lo, double y_hi);
    void polyline(std::span<const double> xs, std::span<const double> ys,
                  const std::string& color, double width = 1.0);
    void hline(double y, const std::string& color, double width = 1.0);
    void band(std::span<const double> xs, std::span<const double> y_lo,
              std::span<const double> y_hi, const std::string& color);
    void rect(double x_lo, double x_hi, double y_lo, double y_hi, const std::string& color);

    std::string render() const;

  private:
    double px(double x) const;
    double py(double y) const;

    std::string title_, x_label_, y_label_;
    double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
    std::vector<std::string> shapes_;
};

}  // namespace nonstat
