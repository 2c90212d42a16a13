#include "a2nav/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "a2nav/errors.hpp"
#include "json.hpp"

namespace a2nav {

namespace {

constexpr double kBoundsEps = 1e-9;

struct QueueEntry {
  double key;
  int cell;
  bool operator>(const QueueEntry& o) const {
    if (key != o.key) return key > o.key;
    return cell > o.cell;
  }
};

bool improves(const GridCost& cand, const GridCost& cur, bool cur_reached) {
  if (!cur_reached) return true;
  return cand.cells() < cur.cells();
}

}  // namespace

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::GoTo: return "goto";
    case ActionKind::GoPast: return "gopast";
    case ActionKind::GoInto: return "gointo";
    case ActionKind::GoThrough: return "gothrough";
    case ActionKind::Exit: return "exit";
  }
  return "goto";
}

ActionKind action_kind_from_string(const std::string& name) {
  for (ActionKind k : kAllActionKinds)
    if (to_string(k) == name) return k;
  throw SchemaError("unknown action kind: " + name);
}

std::string canonical_phrase(ActionKind kind) {
  switch (kind) {
    case ActionKind::GoTo: return "go to";
    case ActionKind::GoPast: return "go past";
    case ActionKind::GoInto: return "go into";
    case ActionKind::GoThrough: return "go through";
    case ActionKind::Exit: return "exit";
  }
  return "go to";
}

DistanceField compute_distance_field(const OccupancyGrid& grid,
                                     const std::vector<GridPoint>& sources,
                                     bool wall_penalty) {
  DistanceField field;
  field.width = grid.width;
  field.height = grid.height;
  field.resolution = grid.resolution;
  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
  field.cost.assign(n, GridCost{});
  field.reached.assign(n, false);
  field.parent.assign(n, -1);

  std::vector<bool> near_wall;
  if (wall_penalty) {
    near_wall.assign(n, false);
    for (int r = 0; r < grid.height; ++r)
      for (int c = 0; c < grid.width; ++c) {
        bool touches = false;
        for (int dr = -1; dr <= 1 && !touches; ++dr)
          for (int dc = -1; dc <= 1 && !touches; ++dc)
            if (!grid.is_free(GridPoint{c + dc, r + dr})) touches = true;
        near_wall[static_cast<std::size_t>(r * grid.width + c)] = touches;
      }
  }

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> pq;
  for (const auto& s : sources) {
    if (!grid.is_free(s)) continue;
    const int i = grid.index(s);
    if (field.reached[static_cast<std::size_t>(i)]) continue;
    field.reached[static_cast<std::size_t>(i)] = true;
    pq.push(QueueEntry{0.0, i});
  }

  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    const QueueEntry top = pq.top();
    pq.pop();
    const int u = top.cell;
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = true;
    const GridPoint gu{u % grid.width, u / grid.width};
    const GridCost cu = field.cost[static_cast<std::size_t>(u)];

    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const GridPoint gv{gu.col + dc, gu.row + dr};
        if (!grid.is_free(gv)) continue;
        const bool diagonal = (dr != 0 && dc != 0);
        if (diagonal) {
          // No corner cutting: both orthogonal neighbors must be Free.
          if (!grid.is_free(GridPoint{gu.col + dc, gu.row}) ||
              !grid.is_free(GridPoint{gu.col, gu.row + dr}))
            continue;
        }
        const int v = grid.index(gv);
        int weight = 1;
        if (wall_penalty && near_wall[static_cast<std::size_t>(v)]) weight = 2;
        GridCost cand = cu;
        if (diagonal)
          cand.diag += weight;
        else
          cand.axis += weight;
        if (improves(cand, field.cost[static_cast<std::size_t>(v)],
                     field.reached[static_cast<std::size_t>(v)])) {
          field.cost[static_cast<std::size_t>(v)] = cand;
          field.reached[static_cast<std::size_t>(v)] = true;
          field.parent[static_cast<std::size_t>(v)] = u;
          pq.push(QueueEntry{cand.cells(), v});
        }
      }
  }
  return field;
}

std::vector<Entrance> detect_entrances(const OccupancyGrid& grid, const Region& region) {
  // Grid rectangle of cells whose centers lie inside the bbox.
  const auto lo_col = static_cast<int>(
      std::ceil((region.xmin - grid.origin.x) / grid.resolution - 0.5 - kBoundsEps));
  const auto hi_col = static_cast<int>(
      std::floor((region.xmax - grid.origin.x) / grid.resolution - 0.5 + kBoundsEps));
  const auto lo_row = static_cast<int>(
      std::ceil((region.ymin - grid.origin.y) / grid.resolution - 0.5 - kBoundsEps));
  const auto hi_row = static_cast<int>(
      std::floor((region.ymax - grid.origin.y) / grid.resolution - 0.5 + kBoundsEps));
  const int c0 = std::max(lo_col, 0), c1 = std::min(hi_col, grid.width - 1);
  const int r0 = std::max(lo_row, 0), r1 = std::min(hi_row, grid.height - 1);
  if (c0 > c1 || r0 > r1) return {};

  auto on_ring = [&](int c, int r) {
    return c == c0 || c == c1 || r == r0 || r == r1;
  };

  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<bool> seen(n, false);
  std::vector<Entrance> result;

  // Row-major scan gives the deterministic (row, col) component ordering.
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      if (!on_ring(c, r)) continue;
      const GridPoint g{c, r};
      if (!grid.is_free(g)) continue;
      const std::size_t idx = static_cast<std::size_t>(grid.index(g));
      if (seen[idx]) continue;

      Entrance e;
      e.region_id = region.id;
      std::queue<GridPoint> bfs;
      bfs.push(g);
      seen[idx] = true;
      while (!bfs.empty()) {
        const GridPoint cur = bfs.front();
        bfs.pop();
        e.cells.push_back(cur);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const GridPoint nb{cur.col + dc, cur.row + dr};
            if (nb.col < c0 || nb.col > c1 || nb.row < r0 || nb.row > r1) continue;
            if (!on_ring(nb.col, nb.row) || !grid.is_free(nb)) continue;
            const std::size_t ni = static_cast<std::size_t>(grid.index(nb));
            if (seen[ni]) continue;
            seen[ni] = true;
            bfs.push(nb);
          }
      }
      std::sort(e.cells.begin(), e.cells.end(), [](const GridPoint& a, const GridPoint& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      WorldPoint sum{0, 0};
      for (const auto& cell : e.cells) {
        const WorldPoint w = grid.cell_center(cell);
        sum.x += w.x;
        sum.y += w.y;
      }
      e.midpoint = WorldPoint{sum.x / e.cells.size(), sum.y / e.cells.size()};
      result.push_back(std::move(e));
    }
  return result;
}

Scene make_scene(std::string id, OccupancyGrid grid, std::vector<Region> regions,
                 std::vector<ObjectInstance> objects) {
  if (grid.resolution <= 0.0) throw SchemaError("resolution: must be > 0");
  if (grid.width <= 0 || grid.height <= 0) throw SchemaError("grid: empty");
  if (grid.cells.size() != static_cast<std::size_t>(grid.width) * grid.height)
    throw SchemaError("grid: cell count does not match width*height");

  Scene scene;
  scene.id = std::move(id);
  scene.grid = std::move(grid);

  for (int r = 0; r < scene.grid.height; ++r)
    for (int c = 0; c < scene.grid.width; ++c)
      if (scene.grid.is_free(GridPoint{c, r})) scene.free_cells.push_back(GridPoint{c, r});
  if (scene.free_cells.empty()) throw InvariantError("grid: no Free cell");

  for (auto& region : regions) {
    if (region.xmax <= region.xmin || region.ymax <= region.ymin)
      throw InvariantError("region " + region.id + ": bbox has no area");
    for (const auto& other : scene.regions)
      if (other.id == region.id)
        throw InvariantError("region " + region.id + ": duplicate id");
    region.entrances = detect_entrances(scene.grid, region);
    scene.regions.push_back(std::move(region));
  }

  for (auto& obj : objects) {
    const GridPoint g = scene.grid.world_to_grid(obj.position);
    if (!scene.grid.is_free(g))
      throw InvariantError("object " + obj.label + ": position is not navigable");
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

Scene load_scene(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("document: not valid JSON: ") + e.what());
  }
  try {
    OccupancyGrid grid;
    grid.resolution = doc.at("resolution").get<double>();
    const auto origin = doc.at("origin");
    grid.origin = WorldPoint{origin.at(0).get<double>(), origin.at(1).get<double>()};
    const auto rows = doc.at("grid");
    if (!rows.is_array() || rows.empty()) throw SchemaError("grid: must be a non-empty array");
    grid.height = static_cast<int>(rows.size());
    grid.width = static_cast<int>(rows.at(0).get<std::string>().size());
    for (const auto& row : rows) {
      const std::string s = row.get<std::string>();
      if (static_cast<int>(s.size()) != grid.width)
        throw SchemaError("grid: ragged rows");
      for (char ch : s) {
        if (ch == '.')
          grid.cells.push_back(static_cast<std::uint8_t>(Cell::Free));
        else if (ch == '#')
          grid.cells.push_back(static_cast<std::uint8_t>(Cell::Blocked));
        else
          throw SchemaError(std::string("grid: invalid cell character '") + ch + "'");
      }
    }

    std::vector<Region> regions;
    for (const auto& r : doc.value("regions", nlohmann::json::array())) {
      Region region;
      region.id = r.at("id").get<std::string>();
      region.label = r.at("label").get<std::string>();
      const auto& bbox = r.at("bbox");
      region.xmin = bbox.at(0).get<double>();
      region.ymin = bbox.at(1).get<double>();
      region.xmax = bbox.at(2).get<double>();
      region.ymax = bbox.at(3).get<double>();
      regions.push_back(std::move(region));
    }

    std::vector<ObjectInstance> objects;
    for (const auto& o : doc.value("objects", nlohmann::json::array())) {
      ObjectInstance obj;
      obj.label = o.at("label").get<std::string>();
      obj.position = WorldPoint{o.at("position").at(0).get<double>(),
                                o.at("position").at(1).get<double>()};
      objects.push_back(std::move(obj));
    }
    return make_scene(doc.at("id").get<std::string>(), std::move(grid),
                      std::move(regions), std::move(objects));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("document: ") + e.what());
  }
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scene(buf.str());
}

std::string scene_to_json(const Scene& scene) {
  nlohmann::json doc;
  doc["id"] = scene.id;
  doc["resolution"] = scene.grid.resolution;
  doc["origin"] = {scene.grid.origin.x, scene.grid.origin.y};
  std::vector<std::string> rows;
  for (int r = 0; r < scene.grid.height; ++r) {
    std::string row;
    for (int c = 0; c < scene.grid.width; ++c)
      row.push_back(scene.grid.is_free(GridPoint{c, r}) ? '.' : '#');
    rows.push_back(std::move(row));
  }
  doc["grid"] = rows;
  doc["regions"] = nlohmann::json::array();
  for (const auto& region : scene.regions)
    doc["regions"].push_back({{"id", region.id},
                              {"label", region.label},
                              {"bbox", {region.xmin, region.ymin, region.xmax, region.ymax}}});
  doc["objects"] = nlohmann::json::array();
  for (const auto& obj : scene.objects)
    doc["objects"].push_back(
        {{"label", obj.label}, {"position", {obj.position.x, obj.position.y}}});
  return doc.dump(2);
}

namespace {

void check_in_bounds(const Scene& scene, const WorldPoint& p, const char* name) {
  if (!scene.grid.contains_world(p)) {
    std::ostringstream msg;
    msg << name << ": point (" << p.x << ", " << p.y << ") is outside the grid";
    throw OutOfBoundsError(msg.str());
  }
}

std::vector<WorldPoint> reconstruct(const Scene& scene, const DistanceField& field,
                                    GridPoint src, GridPoint dst) {
  std::vector<WorldPoint> path;
  int cur = scene.grid.index(dst);
  const int start = scene.grid.index(src);
  while (true) {
    const GridPoint g{cur % scene.grid.width, cur / scene.grid.width};
    path.push_back(scene.grid.cell_center(g));
    if (cur == start) break;
    cur = field.parent[static_cast<std::size_t>(cur)];
    if (cur < 0) throw UnreachableError("path reconstruction lost the source");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<WorldPoint> path_impl(const Scene& scene, const WorldPoint& a,
                                  const WorldPoint& b, bool wall_penalty) {
  check_in_bounds(scene, a, "a");
  check_in_bounds(scene, b, "b");
  const GridPoint ga = scene.grid.world_to_grid(a);
  const GridPoint gb = scene.grid.world_to_grid(b);
  if (ga == gb) return {scene.grid.cell_center(ga)};
  const DistanceField field = compute_distance_field(scene.grid, {ga}, wall_penalty);
  if (!field.is_reached(gb)) throw UnreachableError("no path between the given points");
  return reconstruct(scene, field, ga, gb);
}

}  // namespace

std::optional<double> geodesic_distance(const Scene& scene, const WorldPoint& a,
                                        const WorldPoint& b) {
  check_in_bounds(scene, a, "a");
  check_in_bounds(scene, b, "b");
  const GridPoint ga = scene.grid.world_to_grid(a);
  const GridPoint gb = scene.grid.world_to_grid(b);
  if (ga == gb) return 0.0;
  if (!scene.grid.is_free(ga) || !scene.grid.is_free(gb)) return std::nullopt;
  const DistanceField field = compute_distance_field(scene.grid, {ga});
  return field.meters_at(gb);
}

std::vector<WorldPoint> shortest_path(const Scene& scene, const WorldPoint& a,
                                      const WorldPoint& b) {
  return path_impl(scene, a, b, false);
}

std::vector<WorldPoint> plan_path(const Scene& scene, const WorldPoint& a,
                                  const WorldPoint& b) {
  return path_impl(scene, a, b, true);
}

std::optional<std::string> region_containing(const Scene& scene, const WorldPoint& p) {
  check_in_bounds(scene, p, "p");
  for (const auto& region : scene.regions)
    if (region.contains(p)) return region.id;
  return std::nullopt;
}

double polyline_length(const std::vector<WorldPoint>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += euclidean(path[i - 1], path[i]);
  return total;
}

}  // namespace a2nav
