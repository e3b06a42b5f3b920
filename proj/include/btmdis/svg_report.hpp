#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "btmdis/types.hpp"

namespace btm::report {

/// One curve per call; hand-emitted SVG, no plotting dependency.
struct SeriesPlot {
  std::string title;
  Vector truth;
  Vector estimate;
  std::optional<Vector> band_lo;  // shaded band when both are present
  std::optional<Vector> band_hi;
};

void write_plot(const SeriesPlot& plot, const std::filesystem::path& path);

}  // namespace btm::report
