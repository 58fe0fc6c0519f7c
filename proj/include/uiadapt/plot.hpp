#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uiadapt/harness.hpp"

namespace uiadapt {

struct CurveSeries {
  std::string label;
  std::vector<double> mean;
  std::vector<double> sd;  // empty or all zero: no band
};

/// Learning curves as a standalone SVG document: one polyline per series,
/// a shaded mean +/- sd band where sd is non-zero, axes labeled "episode"
/// and "mean reward", and one legend entry per series. Output depends only
/// on the input. Throws Error(EmptyInput) when there is no series or a
/// series has no points.
std::string render_learning_curve_svg(const std::vector<CurveSeries>& series);

std::vector<CurveSeries> curve_series(const ExperimentResult& result);
std::vector<CurveSeries> curve_series(const ComparisonReport& report);

void render_learning_curve(const ExperimentResult& result, const std::filesystem::path& path);
void render_learning_curve(const ComparisonReport& report, const std::filesystem::path& path);

}  // namespace uiadapt
