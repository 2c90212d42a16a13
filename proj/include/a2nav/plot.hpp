#pragma once

#include <string>

#include "a2nav/navigator.hpp"
#include "a2nav/scene.hpp"

namespace a2nav {

struct PlotConfig {
  double pixels_per_meter = 40.0;
  double margin_px = 10.0;
};

// Scene-only rendering: occupancy grid, region boxes with labels, entrances,
// object markers.
std::string render_scene_svg(const Scene& scene, const PlotConfig& config = {});

// Scene plus the trajectory: one poly-line per sub-task, shaded light to
// dark in execution order, with start/stop markers. Each step contributes
// exactly one poly-line point.
std::string render_trajectory_svg(const Scene& scene, const Trajectory& trajectory,
                                  const PlotConfig& config = {});

}  // namespace a2nav
