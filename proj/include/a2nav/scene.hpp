#pragma once

#include <optional>
#include <string>
#include <vector>

#include "a2nav/types.hpp"

namespace a2nav {

enum class Cell : std::uint8_t { Free = 0, Blocked = 1 };

struct OccupancyGrid {
  double resolution = 0.25;  // meters per cell
  WorldPoint origin;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;  // row-major, width*height

  int index(const GridPoint& g) const { return g.row * width + g.col; }

  bool in_bounds(const GridPoint& g) const {
    return g.col >= 0 && g.col < width && g.row >= 0 && g.row < height;
  }

  // Out-of-bounds reads as Blocked.
  bool is_free(const GridPoint& g) const {
    return in_bounds(g) && cells[static_cast<std::size_t>(index(g))] ==
                               static_cast<std::uint8_t>(Cell::Free);
  }

  GridPoint world_to_grid(const WorldPoint& p) const {
    return GridPoint{static_cast<int>(std::floor((p.x - origin.x) / resolution)),
                     static_cast<int>(std::floor((p.y - origin.y) / resolution))};
  }

  WorldPoint cell_center(const GridPoint& g) const {
    return WorldPoint{origin.x + (g.col + 0.5) * resolution,
                      origin.y + (g.row + 0.5) * resolution};
  }

  bool contains_world(const WorldPoint& p) const { return in_bounds(world_to_grid(p)); }
};

struct Entrance {
  std::string region_id;
  std::vector<GridPoint> cells;  // one 8-connected run on the bbox boundary
  WorldPoint midpoint;           // centroid of the cells' world coordinates
};

struct Region {
  std::string id;
  std::string label;
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  std::vector<Entrance> entrances;

  bool contains(const WorldPoint& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

struct ObjectInstance {
  std::string label;
  WorldPoint position;
};

struct Scene {
  std::string id;
  OccupancyGrid grid;
  std::vector<Region> regions;
  std::vector<ObjectInstance> objects;
  std::vector<GridPoint> free_cells;  // cached for uniform sampling

  const Region* region_by_id(const std::string& rid) const {
    for (const auto& r : regions)
      if (r.id == rid) return &r;
    return nullptr;
  }
};

// Grid path length as exact integer counts of axis and diagonal steps.
// Meters are always reconstituted the same way, so two searches that agree
// on the step counts agree on the double to the last bit.
struct GridCost {
  int axis = 0;
  int diag = 0;

  double cells() const { return axis + diag * 1.4142135623730951; }
  double meters(double resolution) const { return cells() * resolution; }
};

// Single-source shortest-path field over Free cells (8-connected, no
// corner cutting: a diagonal move requires both orthogonal neighbors Free).
struct DistanceField {
  int width = 0;
  int height = 0;
  double resolution = 0.25;
  std::vector<GridCost> cost;      // per cell
  std::vector<bool> reached;       // per cell
  std::vector<int> parent;         // per cell, -1 at source/unreached

  bool is_reached(const GridPoint& g) const {
    if (g.col < 0 || g.col >= width || g.row < 0 || g.row >= height) return false;
    return reached[static_cast<std::size_t>(g.row * width + g.col)];
  }
  std::optional<double> meters_at(const GridPoint& g) const {
    if (!is_reached(g)) return std::nullopt;
    return cost[static_cast<std::size_t>(g.row * width + g.col)].meters(resolution);
  }
};

// Dijkstra from one or more source cells. When wall_penalty is true, steps
// into cells that touch a Blocked cell cost double; the navigator uses this
// to keep planned paths off the walls. Metric queries use the plain field.
DistanceField compute_distance_field(const OccupancyGrid& grid,
                                     const std::vector<GridPoint>& sources,
                                     bool wall_penalty = false);

// Scene document I/O (JSON; grid rows as strings of '.'/'#').
Scene load_scene(const std::string& document);
Scene load_scene_file(const std::string& path);
std::string scene_to_json(const Scene& scene);

// Builds a Scene from parts, validating every invariant and detecting
// entrances. All constructors funnel through here.
Scene make_scene(std::string id, OccupancyGrid grid, std::vector<Region> regions,
                 std::vector<ObjectInstance> objects);

std::vector<Entrance> detect_entrances(const OccupancyGrid& grid, const Region& region);

// Shortest 8-connected Free-cell path length in meters; nullopt when no
// path exists. Throws OutOfBoundsError when either point is off the grid.
std::optional<double> geodesic_distance(const Scene& scene, const WorldPoint& a,
                                        const WorldPoint& b);

// Cell-center poly-line from a to b; throws UnreachableError.
std::vector<WorldPoint> shortest_path(const Scene& scene, const WorldPoint& a,
                                      const WorldPoint& b);

// Planner variant with wall-avoidance weighting; same reachability.
std::vector<WorldPoint> plan_path(const Scene& scene, const WorldPoint& a,
                                  const WorldPoint& b);

// First region (declaration order) whose bbox contains p.
std::optional<std::string> region_containing(const Scene& scene, const WorldPoint& p);

double polyline_length(const std::vector<WorldPoint>& path);

}  // namespace a2nav
