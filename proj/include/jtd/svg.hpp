#pragma once

// Minimal static SVG charts: histogram bars, polylines and horizontal rules
// on linear axes. Output depends only on the data, so equal inputs give
// byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace jtd::svg {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return colors[k % 6];
}

class Chart {
 public:
  Chart(double x_lo, double x_hi, double y_lo, double y_hi)
      : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi > y_lo ? y_hi : y_lo + 1.0) {}

  Chart& title(std::string t) { title_ = std::move(t); return *this; }
  Chart& x_label(std::string t) { x_label_ = std::move(t); return *this; }
  Chart& y_label(std::string t) { y_label_ = std::move(t); return *this; }

  /// Bars over [edges[k], edges[k+1]), clipped to the x range.
  Chart& bars(std::span<const double> edges, std::span<const double> heights, std::string label,
              double opacity = 0.5) {
    const char* color = palette(series_++);
    std::string s;
    for (std::size_t k = 0; k + 1 < edges.size() && k < heights.size(); ++k) {
      const double a = std::max(edges[k], x_lo_);
      const double b = std::min(edges[k + 1], x_hi_);
      if (!(b > a) || !(heights[k] > 0.0)) continue;
      const double top = std::min(heights[k], y_hi_);
      s += "<rect x=\"" + num(px(a)) + "\" y=\"" + num(py(top)) + "\" width=\"" +
           num(px(b) - px(a)) + "\" height=\"" + num(py(y_lo_) - py(top)) + "\"/>\n";
    }
    body_ += "<g fill=\"" + std::string(color) + "\" fill-opacity=\"" + num(opacity) +
             "\" stroke=\"none\">\n" + s + "</g>\n";
    legend_.push_back({color, std::move(label)});
    return *this;
  }

  Chart& line(std::span<const double> x, std::span<const double> y, std::string label,
              bool markers = false) {
    const char* color = palette(series_++);
    std::string pts;
    for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
      if (!std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(x[k])) + "," + num(py(y[k]));
    }
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    if (markers) {
      for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
        if (!std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
        body_ += "<circle cx=\"" + num(px(x[k])) + "\" cy=\"" + num(py(y[k])) +
                 "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    }
    legend_.push_back({color, std::move(label)});
    return *this;
  }

  Chart& hrule(double y, std::string label) {
    body_ += "<line x1=\"" + num(px(x_lo_)) + "\" y1=\"" + num(py(y)) + "\" x2=\"" +
             num(px(x_hi_)) + "\" y2=\"" + num(py(y)) +
             "\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>\n";
    legend_.push_back({"#555", std::move(label)});
    return *this;
  }

  std::string render() const {
    std::string s =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
        num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    s += axes();
    s += body_;
    for (std::size_t k = 0; k < legend_.size(); ++k) {
      const double y = kTop + 14.0 + 16.0 * static_cast<double>(k);
      s += "<rect x=\"" + num(kWidth - kRight - 150.0) + "\" y=\"" + num(y - 9.0) +
           "\" width=\"10\" height=\"10\" fill=\"" + legend_[k].color + "\"/>\n";
      s += "<text x=\"" + num(kWidth - kRight - 135.0) + "\" y=\"" + num(y) + "\">" +
           escape(legend_[k].label) + "</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
  }

 private:
  static constexpr double kWidth = 720.0;
  static constexpr double kHeight = 450.0;
  static constexpr double kLeft = 70.0;
  static constexpr double kRight = 20.0;
  static constexpr double kTop = 40.0;
  static constexpr double kBottom = 55.0;

  struct LegendEntry {
    std::string color;
    std::string label;
  };

  double px(double x) const {
    return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y_lo_) / (y_hi_ - y_lo_) * (kHeight - kTop - kBottom);
  }

  std::string axes() const {
    std::string s;
    const double x0 = px(x_lo_), x1 = px(x_hi_), y0 = py(y_lo_), y1 = py(y_hi_);
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) +
         "\" height=\"" + num(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
      const double fx = x_lo_ + (x_hi_ - x_lo_) * k / 5.0;
      const double fy = y_lo_ + (y_hi_ - y_lo_) * k / 5.0;
      s += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px(fx)) +
           "\" y2=\"" + num(y0 + 5.0) + "\" stroke=\"black\"/>\n";
      s += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(y0 + 19.0) +
           "\" text-anchor=\"middle\">" + tick_label(fx) + "</text>\n";
      s += "<line x1=\"" + num(x0 - 5.0) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" + num(x0) +
           "\" y2=\"" + num(py(fy)) + "\" stroke=\"black\"/>\n";
      s += "<text x=\"" + num(x0 - 8.0) + "\" y=\"" + num(py(fy) + 4.0) +
           "\" text-anchor=\"end\">" + tick_label(fy) + "</text>\n";
    }
    s += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" + num(kHeight - 12.0) +
         "\" text-anchor=\"middle\">" + escape(x_label_) + "</text>\n";
    s += "<text transform=\"translate(16," + num(0.5 * (y0 + y1)) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label_) + "</text>\n";
    s += "<text x=\"" + num(0.5 * kWidth) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title_) + "</text>\n";
    return s;
  }

  double x_lo_, x_hi_, y_lo_, y_hi_;
  std::string title_, x_label_, y_label_;
  std::string body_;
  std::vector<LegendEntry> legend_;
  std::size_t series_ = 0;
};

}  // namespace jtd::svg
