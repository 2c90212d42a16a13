#include "a2nav/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace a2nav {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Mapper {
  const Scene& scene;
  PlotConfig config;

  double px(double x) const {
    return config.margin_px + (x - scene.grid.origin.x) * config.pixels_per_meter;
  }
  // SVG y grows downward; world y grows upward.
  double py(double y) const {
    const double top = scene.grid.origin.y + scene.grid.height * scene.grid.resolution;
    return config.margin_px + (top - y) * config.pixels_per_meter;
  }
  double width() const {
    return 2 * config.margin_px +
           scene.grid.width * scene.grid.resolution * config.pixels_per_meter;
  }
  double height() const {
    return 2 * config.margin_px +
           scene.grid.height * scene.grid.resolution * config.pixels_per_meter;
  }
};

// Light-to-dark blue ramp across sub-tasks.
std::string subtask_color(int index, int count) {
  const double t = count <= 1 ? 1.0 : static_cast<double>(index) / (count - 1);
  const int r = static_cast<int>(160 - 130 * t);
  const int g = static_cast<int>(200 - 140 * t);
  const int b = 255;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void draw_scene(std::ostringstream& out, const Mapper& m) {
  const Scene& scene = m.scene;
  const double cell = scene.grid.resolution * m.config.pixels_per_meter;
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(m.width()) << "\" height=\""
      << fmt(m.height()) << "\" fill=\"white\"/>\n";
  out << "<g class=\"grid\" fill=\"#444444\">\n";
  for (int r = 0; r < scene.grid.height; ++r)
    for (int c = 0; c < scene.grid.width; ++c)
      if (!scene.grid.is_free(GridPoint{c, r})) {
        const WorldPoint center = scene.grid.cell_center(GridPoint{c, r});
        out << "<rect x=\"" << fmt(m.px(center.x) - cell / 2) << "\" y=\""
            << fmt(m.py(center.y) - cell / 2) << "\" width=\"" << fmt(cell)
            << "\" height=\"" << fmt(cell) << "\"/>\n";
      }
  out << "</g>\n";

  out << "<g class=\"regions\">\n";
  for (const auto& region : scene.regions) {
    out << "<rect x=\"" << fmt(m.px(region.xmin)) << "\" y=\"" << fmt(m.py(region.ymax))
        << "\" width=\"" << fmt((region.xmax - region.xmin) * m.config.pixels_per_meter)
        << "\" height=\"" << fmt((region.ymax - region.ymin) * m.config.pixels_per_meter)
        << "\" fill=\"none\" stroke=\"#2a9d8f\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << fmt(m.px(region.xmin) + 4) << "\" y=\""
        << fmt(m.py(region.ymax) + 14) << "\" fill=\"#2a9d8f\" font-size=\"12\">"
        << region.label << "</text>\n";
    for (const auto& entrance : region.entrances)
      out << "<circle class=\"entrance\" cx=\"" << fmt(m.px(entrance.midpoint.x))
          << "\" cy=\"" << fmt(m.py(entrance.midpoint.y))
          << "\" r=\"4\" fill=\"#e9c46a\"/>\n";
  }
  out << "</g>\n";

  out << "<g class=\"objects\">\n";
  for (const auto& obj : scene.objects)
    out << "<circle cx=\"" << fmt(m.px(obj.position.x)) << "\" cy=\""
        << fmt(m.py(obj.position.y)) << "\" r=\"3\" fill=\"#e76f51\"/>\n";
  out << "</g>\n";
}

std::string render(const Scene& scene, const Trajectory* traj, const PlotConfig& config) {
  Mapper m{scene, config};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(m.width())
      << "\" height=\"" << fmt(m.height()) << "\">\n";
  draw_scene(out, m);

  if (traj) {
    // Group steps by sub-task, keeping execution order.
    std::vector<std::pair<int, std::vector<const StepRecord*>>> groups;
    for (const auto& step : traj->steps) {
      if (groups.empty() || groups.back().first != step.subtask_index)
        groups.push_back({step.subtask_index, {}});
      groups.back().second.push_back(&step);
    }
    out << "<g class=\"trajectory\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      out << "<polyline stroke=\""
          << subtask_color(static_cast<int>(gi), static_cast<int>(groups.size()))
          << "\" points=\"";
      bool first = true;
      for (const StepRecord* step : groups[gi].second) {
        if (!first) out << " ";
        first = false;
        out << fmt(m.px(step->pose_after.position.x)) << ","
            << fmt(m.py(step->pose_after.position.y));
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
    out << "<circle class=\"start\" cx=\"" << fmt(m.px(traj->start.position.x))
        << "\" cy=\"" << fmt(m.py(traj->start.position.y))
        << "\" r=\"5\" fill=\"#2ecc71\"/>\n";
    const Pose final = traj->final_pose();
    out << "<circle class=\"stop\" cx=\"" << fmt(m.px(final.position.x)) << "\" cy=\""
        << fmt(m.py(final.position.y)) << "\" r=\"5\" fill=\"#c0392b\"/>\n";
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace

std::string render_scene_svg(const Scene& scene, const PlotConfig& config) {
  return render(scene, nullptr, config);
}

std::string render_trajectory_svg(const Scene& scene, const Trajectory& trajectory,
                                  const PlotConfig& config) {
  return render(scene, &trajectory, config);
}

}  // namespace a2nav
