#include "nonstat/svg.hpp"

#include <cmath>
#include <cstdio>

namespace nonstat {

namespace {
constexpr double kWidth = 800, kHeight = 500;
constexpr double kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::set_range(double x_lo, double x_hi, double y_lo, double y_hi) {
    x_lo_ = x_lo;
    x_hi_ = x_hi == x_lo ? x_lo + 1 : x_hi;
    y_lo_ = y_lo;
    y_hi_ = y_hi == y_lo ? y_lo + 1 : y_hi;
}

double SvgPlot::px(double x) const {
    return kMarginL + (x - x_lo_) / (x_hi_ - x_lo_) * (kWidth - kMarginL - kMarginR);
}

double SvgPlot::py(double y) const {
    return kHeight - kMarginB - (y - y_lo_) / (y_hi_ - y_lo_) * (kHeight - kMarginT - kMarginB);
}

void SvgPlot::polyline(std::span<const double> xs, std::span<const double> ys,
                       const std::string& color, double width) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
        pts += num(px(xs[i])) + "," + num(py(ys[i])) + " ";
    }
    shapes_.push_back("<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                      num(width) + "\" points=\"" + pts + "\"/>");
}

void SvgPlot::hline(double y, const std::string& color, double width) {
    shapes_.push_back("<line x1=\"" + num(px(x_lo_)) + "\" y1=\"" + num(py(y)) + "\" x2=\"" +
                      num(px(x_hi_)) + "\" y2=\"" + num(py(y)) + "\" stroke=\"" + color +
                      "\" stroke-width=\"" + num(width) + "\" stroke-dasharray=\"6,4\"/>");
}

void SvgPlot::band(std::span<const double> xs, std::span<const double> y_lo,
                   std::span<const double> y_hi, const std::string& color) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts += num(px(xs[i])) + "," + num(py(y_hi[i])) + " ";
    for (std::size_t i = xs.size(); i-- > 0;) pts += num(px(xs[i])) + "," + num(py(y_lo[i])) + " ";
    shapes_.push_back("<polygon fill=\"" + color + "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"" +
                      pts + "\"/>");
}

void SvgPlot::rect(double x_lo, double x_hi, double y_lo, double y_hi,
                   const std::string& color) {
    shapes_.push_back("<rect x=\"" + num(px(x_lo)) + "\" y=\"" + num(py(y_hi)) + "\" width=\"" +
                      num(px(x_hi) - px(x_lo)) + "\" height=\"" + num(py(y_lo) - py(y_hi)) +
                      "\" fill=\"" + color + "\"/>");
}

std::string SvgPlot::render() const {
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
        "height=\"500\" viewBox=\"0 0 800 500\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    svg += "<rect x=\"" + num(kMarginL) + "\" y=\"" + num(kMarginT) + "\" width=\"" +
           num(kWidth - kMarginL - kMarginR) + "\" height=\"" +
           num(kHeight - kMarginT - kMarginB) +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (const auto& s : shapes_) svg += s + "\n";
    svg += "<text x=\"400\" y=\"25\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"16\">" + title_ + "</text>\n";
    svg += "<text x=\"400\" y=\"490\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"13\">" + x_label_ + "</text>\n";
    svg += "<text x=\"16\" y=\"250\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"13\" transform=\"rotate(-90 16 250)\">" + y_label_ + "</text>\n";
    // Axis extent labels.
    svg += "<text x=\"" + num(kMarginL) + "\" y=\"470\" font-family=\"monospace\" font-size=\"11\">" +
           num(x_lo_) + "</text>\n";
    svg += "<text x=\"" + num(kWidth - kMarginR) + "\" y=\"470\" text-anchor=\"end\" "
           "font-family=\"monospace\" font-size=\"11\">" + num(x_hi_) + "</text>\n";
    svg += "<text x=\"" + num(kMarginL - 4) + "\" y=\"" + num(kHeight - kMarginB) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + num(y_lo_) +
           "</text>\n";
    svg += "<text x=\"" + num(kMarginL - 4) + "\" y=\"" + num(kMarginT + 10) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + num(y_hi_) +
           "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace nonstat
