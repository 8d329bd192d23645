#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "overage/cli/evaluation.hpp"

namespace overage::cli {

inline constexpr std::array<std::string_view, 5> kPresetNames = {"fig3", "fig4a", "fig4b", "fig5", "fig6"};
inline constexpr std::array<double, 4> kGammaShapes = {0.5, 1.0, 2.0, 4.0};
inline constexpr std::array<double, 4> kFig4bThresholds = {0.5, 1.0, 2.0, 3.0};

struct PresetPoint {
  Scenario scenario;
  std::vector<Metric> metrics;
};

/// The fixed grid behind a figure, series by series with the swept value ascending.
std::optional<std::vector<PresetPoint>> preset_points(std::string_view name);

}  // namespace overage::cli
