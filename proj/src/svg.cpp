#include "bvmlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bvmlab::svg {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kPad = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_svg_string(const std::vector<std::pair<double, double>>& points, PlotKind kind,
                              const PlotOptions& options) {
  if (points.empty()) throw std::invalid_argument("render_svg: no points");
  double x0 = points[0].first, x1 = x0, y0 = points[0].second, y1 = y0;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("render_svg: non-finite point");
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (kind == PlotKind::kQQ) {
    // Shared range so the reference line is the diagonal.
    x0 = y0 = std::min(x0, y0);
    x1 = y1 = std::max(x1, y1);
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double w = kWidth - 2 * kPad;
  const double h = kHeight - 2 * kPad;
  auto px = [&](double x) { return kPad + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return kHeight - kPad - (y - y0) / (y1 - y0) * h; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(options.title) + "</text>\n";
  }
  // Axes box with end-point tick labels.
  s += "<rect x=\"" + num(kPad) + "\" y=\"" + num(kPad) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kPad) + "\" y=\"" + num(kHeight - kPad + 16) + "\" font-size=\"11\">" + label(x0) +
       "</text>\n";
  s += "<text x=\"" + num(kWidth - kPad) + "\" y=\"" + num(kHeight - kPad + 16) +
       "\" text-anchor=\"end\" font-size=\"11\">" + label(x1) + "</text>\n";
  s += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(kHeight - kPad) + "\" text-anchor=\"end\" font-size=\"11\">" +
       label(y0) + "</text>\n";
  s += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(kPad + 10) + "\" text-anchor=\"end\" font-size=\"11\">" +
       label(y1) + "</text>\n";
  if (!options.x_label.empty()) {
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\" font-size=\"12\">" +
         escape(options.x_label) + "</text>\n";
  }
  if (!options.y_label.empty()) {
    s += "<text x=\"16\" y=\"" + num(kHeight / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num(kHeight / 2) + ")\">" + escape(options.y_label) + "</text>\n";
  }

  if (kind == PlotKind::kQQ) {
    s += "<line class=\"reference\" x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) + "\" x2=\"" + num(px(x1)) +
         "\" y2=\"" + num(py(y1)) + "\" stroke=\"red\" stroke-width=\"1\"/>\n";
    for (const auto& [x, y] : points) {
      s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"2\" fill=\"steelblue\"/>\n";
    }
  } else {
    std::vector<std::pair<double, double>> sorted = points;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i) s += ' ';
      s += num(px(sorted[i].first)) + "," + num(py(sorted[i].second));
    }
    s += "\"/>\n";
    for (const auto& [x, y] : sorted) {
      s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

void render_svg(const std::vector<std::pair<double, double>>& points, PlotKind kind,
                const std::string& path, const PlotOptions& options) {
  const std::string content = render_svg_string(points, kind, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_svg: cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("render_svg: write failed for " + path);
}

}  // namespace bvmlab::svg
