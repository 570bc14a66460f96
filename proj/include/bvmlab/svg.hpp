#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bvmlab::svg {

enum class PlotKind { kQQ, kTrend };

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Standalone SVG scatter (QQ, with the y = x reference line) or polyline
/// (trend). Throws std::invalid_argument on empty input.
std::string render_svg_string(const std::vector<std::pair<double, double>>& points, PlotKind kind,
                              const PlotOptions& options = {});

/// Writes render_svg_string() to path. Nothing is written for empty input;
/// I/O failures throw std::runtime_error.
void render_svg(const std::vector<std::pair<double, double>>& points, PlotKind kind,
                const std::string& path, const PlotOptions& options = {});

}  // namespace bvmlab::svg
