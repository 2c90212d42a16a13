#include "a2nav/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "a2nav/errors.hpp"
#include "a2nav/rng.hpp"

namespace a2nav {

namespace {

constexpr double kRes = 0.25;

struct GridBuilder {
  OccupancyGrid grid;

  GridBuilder(int width, int height) {
    grid.resolution = kRes;
    grid.origin = WorldPoint{0.0, 0.0};
    grid.width = width;
    grid.height = height;
    grid.cells.assign(static_cast<std::size_t>(width) * height,
                      static_cast<std::uint8_t>(Cell::Free));
  }

  void set(int c, int r, Cell value) {
    if (c < 0 || c >= grid.width || r < 0 || r >= grid.height) return;
    grid.cells[static_cast<std::size_t>(r * grid.width + c)] =
        static_cast<std::uint8_t>(value);
  }

  void border() {
    for (int c = 0; c < grid.width; ++c) {
      set(c, 0, Cell::Blocked);
      set(c, grid.height - 1, Cell::Blocked);
    }
    for (int r = 0; r < grid.height; ++r) {
      set(0, r, Cell::Blocked);
      set(grid.width - 1, r, Cell::Blocked);
    }
  }

  void vwall(int col, int r0, int r1) {
    for (int r = r0; r <= r1; ++r) set(col, r, Cell::Blocked);
  }
  void hwall(int row, int c0, int c1) {
    for (int c = c0; c <= c1; ++c) set(c, row, Cell::Blocked);
  }
  void carve_v(int col, int r0, int r1) {
    for (int r = r0; r <= r1; ++r) set(col, r, Cell::Free);
  }
  void carve_h(int row, int c0, int c1) {
    for (int c = c0; c <= c1; ++c) set(c, row, Cell::Free);
  }
};

bool clear_3x3(const OccupancyGrid& grid, int c, int r) {
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if (!grid.is_free(GridPoint{c + dc, r + dr})) return false;
  return true;
}

// Uniquely-labeled landmark markers on a 3-cell lattice, kept off walls.
void add_markers(const OccupancyGrid& grid, std::vector<ObjectInstance>& objects) {
  for (int r = 1; r < grid.height - 1; ++r)
    for (int c = 1; c < grid.width - 1; ++c) {
      if (c % 3 != 1 || r % 3 != 1) continue;
      if (!clear_3x3(grid, c, r)) continue;
      objects.push_back(ObjectInstance{"marker_" + std::to_string(c) + "_" + std::to_string(r),
                                       grid.cell_center(GridPoint{c, r})});
    }
}

Region make_region(std::string id, std::string label, const OccupancyGrid& grid,
                   int c0, int c1, int r0, int r1) {
  // The bbox is laid over the wall cells so its boundary ring intersects
  // the walls; the free cells left on the ring are the doorways.
  Region region;
  region.id = std::move(id);
  region.label = std::move(label);
  region.xmin = grid.origin.x + c0 * grid.resolution;
  region.xmax = grid.origin.x + (c1 + 1) * grid.resolution;
  region.ymin = grid.origin.y + r0 * grid.resolution;
  region.ymax = grid.origin.y + (r1 + 1) * grid.resolution;
  return region;
}

Scene corridor_fixture(double size_m, std::uint64_t seed) {
  const int width = std::max(24, static_cast<int>(std::lround(size_m / kRes)));
  const int height = 16;
  GridBuilder b(width, height);
  b.border();

  // A few 2x2 pillars keep paths from being trivially straight.
  Rng rng(seed);
  const int pillars = 2 + static_cast<int>(rng.uniform_int(2));
  for (int i = 0; i < pillars; ++i) {
    const int c = 5 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(width - 12)));
    const int r = 4 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(height - 10)));
    for (int dc = 0; dc < 2; ++dc)
      for (int dr = 0; dr < 2; ++dr) b.set(c + dc, r + dr, Cell::Blocked);
  }

  std::vector<ObjectInstance> objects;
  add_markers(b.grid, objects);
  return make_scene("corridor", std::move(b.grid), {}, std::move(objects));
}

Scene two_room_fixture(double size_m, std::uint64_t seed) {
  const int s = std::max(24, static_cast<int>(std::lround(size_m / kRes)));
  const int mid = s / 2;
  GridBuilder b(s, s);
  b.border();
  b.vwall(mid, 1, s - 2);

  Rng rng(seed);
  const int door = 4 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s - 11)));
  b.carve_v(mid, door, door + 2);

  std::vector<Region> regions;
  regions.push_back(make_region("r_bedroom", "bedroom", b.grid, 0, mid, 0, s - 1));
  regions.push_back(make_region("r_kitchen", "kitchen", b.grid, mid, s - 1, 0, s - 1));

  std::vector<ObjectInstance> objects;
  objects.push_back({"bed", b.grid.cell_center(GridPoint{mid / 2, s / 3})});
  objects.push_back({"sofa", b.grid.cell_center(GridPoint{mid + mid / 2, s / 3})});
  objects.push_back({"table", b.grid.cell_center(GridPoint{mid + mid / 2, 2 * s / 3})});
  add_markers(b.grid, objects);
  return make_scene("two-room", std::move(b.grid), std::move(regions), std::move(objects));
}

Scene four_room_ring_fixture(double size_m, std::uint64_t seed) {
  const int s = std::max(32, static_cast<int>(std::lround(size_m / kRes)));
  const int mid = s / 2;
  GridBuilder b(s, s);
  b.border();
  b.vwall(mid, 1, s - 2);
  b.hwall(mid, 1, s - 2);

  Rng rng(seed);
  auto jitter = [&]() { return static_cast<int>(rng.uniform_int(5)) - 2; };
  const int q = mid / 2;
  // Four doors arranged so each room has exactly two entrances.
  const int d_up = std::clamp(q + jitter(), 3, mid - 4);
  const int d_right = std::clamp(mid + q + jitter(), mid + 3, s - 5);
  const int d_down = std::clamp(mid + q + jitter(), mid + 3, s - 5);
  const int d_left = std::clamp(q + jitter(), 3, mid - 4);
  b.carve_v(mid, d_up, d_up + 2);          // lobby <-> kitchen
  b.carve_h(mid, d_right, d_right + 2);    // kitchen <-> bathroom
  b.carve_v(mid, d_down, d_down + 2);      // bedroom <-> bathroom
  b.carve_h(mid, d_left, d_left + 2);      // lobby <-> bedroom

  std::vector<Region> regions;
  regions.push_back(make_region("r_lobby", "lobby", b.grid, 0, mid, 0, mid));
  regions.push_back(make_region("r_kitchen", "kitchen", b.grid, mid, s - 1, 0, mid));
  regions.push_back(make_region("r_bedroom", "bedroom", b.grid, 0, mid, mid, s - 1));
  regions.push_back(make_region("r_bathroom", "bathroom", b.grid, mid, s - 1, mid, s - 1));

  std::vector<ObjectInstance> objects;
  objects.push_back({"plant", b.grid.cell_center(GridPoint{mid / 2, mid / 2})});
  objects.push_back({"sofa", b.grid.cell_center(GridPoint{mid + mid / 2, mid / 2})});
  objects.push_back({"bed", b.grid.cell_center(GridPoint{mid / 2, mid + mid / 2})});
  objects.push_back({"sink", b.grid.cell_center(GridPoint{mid + mid / 2, mid + mid / 2})});
  add_markers(b.grid, objects);
  return make_scene("four-room-ring", std::move(b.grid), std::move(regions),
                    std::move(objects));
}

Scene exit_trap_fixture(double size_m, std::uint64_t seed) {
  const int s = std::max(40, static_cast<int>(std::lround(size_m / kRes)));
  GridBuilder b(s, s);
  b.border();

  // One room whose eponymous landmark sits in the far corner from the only
  // door, so landmark-seeking moves the agent geodesically away from any
  // goal sampled outside the door.
  const int c0 = s / 12, c1 = s / 2;
  const int r0 = s / 4, r1 = 3 * s / 4;
  b.hwall(r0, c0, c1);
  b.hwall(r1, c0, c1);
  b.vwall(c0, r0, r1);
  b.vwall(c1, r0, r1);
  Rng rng(seed);
  const int door = std::clamp(
      (r0 + r1) / 2 + static_cast<int>(rng.uniform_int(5)) - 2, r0 + 2, r1 - 4);
  b.carve_v(c1, door, door + 2);

  std::vector<Region> regions;
  regions.push_back(make_region("r_storage", "storage", b.grid, c0, c1, r0, r1));

  std::vector<ObjectInstance> objects;
  objects.push_back({"storage", b.grid.cell_center(GridPoint{c0 + 2, door + 1})});
  return make_scene("exit-trap", std::move(b.grid), std::move(regions), std::move(objects));
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"corridor", "two-room", "four-room-ring", "exit-trap"};
}

bool is_fixture_name(const std::string& name) {
  const auto names = fixture_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scene generate_fixture(const FixtureSpec& spec) {
  if (spec.size_m <= 0.0) throw SchemaError("fixture size must be > 0");
  if (spec.name == "corridor") return corridor_fixture(spec.size_m, spec.seed);
  if (spec.name == "two-room") return two_room_fixture(spec.size_m, spec.seed);
  if (spec.name == "four-room-ring") return four_room_ring_fixture(spec.size_m, spec.seed);
  if (spec.name == "exit-trap") return exit_trap_fixture(spec.size_m, spec.seed);
  throw SchemaError("unknown fixture generator: " + spec.name);
}

}  // namespace a2nav
