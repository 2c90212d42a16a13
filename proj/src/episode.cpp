#include "a2nav/episode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "a2nav/errors.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace a2nav {

namespace {

double tangent_at(const std::vector<WorldPoint>& path, std::size_t idx) {
  if (path.size() < 2) return 0.0;
  const std::size_t lo = idx == 0 ? 0 : idx - 1;
  const std::size_t hi = std::min(idx + 1, path.size() - 1);
  return normalize_heading(std::atan2(path[hi].y - path[lo].y, path[hi].x - path[lo].x));
}

// Geodesic-nearest object label (ties by declaration order); falls back to
// euclidean when nothing is reachable.
std::string nearest_object_label(const Scene& scene, const WorldPoint& p) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(p)});
  const ObjectInstance* best = nullptr;
  double best_dist = 0.0;
  for (const auto& obj : scene.objects) {
    const auto d = field.meters_at(scene.grid.world_to_grid(obj.position));
    if (!d) continue;
    if (!best || *d < best_dist) {
      best = &obj;
      best_dist = *d;
    }
  }
  if (!best) {
    for (const auto& obj : scene.objects) {
      const double d = euclidean(obj.position, p);
      if (!best || d < best_dist) {
        best = &obj;
        best_dist = d;
      }
    }
  }
  if (!best) throw ResourceUnavailableError("scene has no objects");
  return best->label;
}

std::vector<GridPoint> cells_near(const Scene& scene, const WorldPoint& anchor,
                                  double radius,
                                  const std::function<bool(const WorldPoint&)>& keep) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(anchor)});
  std::vector<GridPoint> out;
  for (const auto& g : scene.free_cells) {
    const auto d = field.meters_at(g);
    if (!d || *d > radius) continue;
    const WorldPoint w = scene.grid.cell_center(g);
    if (keep(w)) out.push_back(g);
  }
  return out;
}

std::vector<GridPoint> cells_inside_region(const Scene& scene, const Region& region) {
  std::vector<GridPoint> out;
  for (const auto& g : scene.free_cells) {
    const WorldPoint w = scene.grid.cell_center(g);
    if (region.contains(w) && region_containing(scene, w) == region.id) out.push_back(g);
  }
  return out;
}

std::vector<const Region*> regions_with_entrances(const Scene& scene,
                                                  std::size_t min_entrances) {
  std::vector<const Region*> out;
  for (const auto& r : scene.regions)
    if (r.entrances.size() >= min_entrances) out.push_back(&r);
  return out;
}

std::optional<std::vector<WorldPoint>> try_path(const Scene& scene, const WorldPoint& a,
                                                const WorldPoint& b) {
  try {
    return shortest_path(scene, a, b);
  } catch (const UnreachableError&) {
    return std::nullopt;
  }
}

double min_entrance_distance(const Scene& scene, const Region& region,
                             const WorldPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : region.entrances) {
    const auto d = geodesic_distance(scene, p, e.midpoint);
    if (d) best = std::min(best, *d);
  }
  return best;
}

}  // namespace

std::size_t vertex_at_fraction(const std::vector<WorldPoint>& path, double fraction) {
  if (path.size() < 2) return 0;
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i)
    cum[i] = cum[i - 1] + euclidean(path[i - 1], path[i]);
  const double target = fraction * cum.back();
  std::size_t best = 0;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (std::fabs(cum[i] - target) < std::fabs(cum[best] - target)) best = i;
  return best;
}

Episode sample_episode(const Scene& scene, ActionKind kind, Rng& rng,
                       const SamplerConfig& config) {
  Episode ep;
  ep.scene_id = scene.id;
  ep.action = kind;

  if ((kind == ActionKind::GoTo || kind == ActionKind::GoPast) && scene.objects.empty())
    throw ResourceUnavailableError("scene " + scene.id + " has no objects for " +
                                   to_string(kind));
  const std::size_t need_entrances = kind == ActionKind::GoThrough ? 2 : 1;
  std::vector<const Region*> eligible;
  if (kind == ActionKind::GoInto || kind == ActionKind::GoThrough ||
      kind == ActionKind::Exit) {
    eligible = regions_with_entrances(scene, need_entrances);
    if (eligible.empty())
      throw ResourceUnavailableError("scene " + scene.id + " has no region with " +
                                     std::to_string(need_entrances) + " entrance(s) for " +
                                     to_string(kind));
  }

  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    switch (kind) {
      case ActionKind::GoTo: {
        const GridPoint a = rng.pick(scene.free_cells);
        const GridPoint b = rng.pick(scene.free_cells);
        if (a == b) continue;
        const auto path =
            try_path(scene, scene.grid.cell_center(a), scene.grid.cell_center(b));
        if (!path) continue;
        ep.path = *path;
        ep.start = Pose{ep.path.front(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.goal = Pose{ep.path.back(), tangent_at(ep.path, ep.path.size() - 1)};
        ep.landmark = nearest_object_label(scene, ep.goal.position);
        return ep;
      }
      case ActionKind::GoPast: {
        const GridPoint a = rng.pick(scene.free_cells);
        const GridPoint b = rng.pick(scene.free_cells);
        const WorldPoint wa = scene.grid.cell_center(a);
        const WorldPoint wb = scene.grid.cell_center(b);
        if (euclidean(wa, wb) <= config.min_displacement) continue;
        const auto path = try_path(scene, wa, wb);
        if (!path) continue;
        ep.path = *path;
        const std::size_t mid = vertex_at_fraction(ep.path, 0.5);
        const double tangent = tangent_at(ep.path, mid);
        const double jitter =
            rng.uniform_real(-config.heading_jitter, config.heading_jitter);
        ep.start = Pose{ep.path.front(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.goal = Pose{ep.path[mid], normalize_heading(tangent + jitter)};
        ep.landmark = nearest_object_label(scene, ep.goal.position);
        return ep;
      }
      case ActionKind::GoInto: {
        const Region* region = rng.pick(eligible);
        const Entrance& entrance = rng.pick(region->entrances);
        const auto starts =
            cells_near(scene, entrance.midpoint, config.entrance_radius,
                       [&](const WorldPoint& w) { return !region->contains(w); });
        const auto goals = cells_inside_region(scene, *region);
        if (starts.empty() || goals.empty()) continue;
        const GridPoint sc = rng.pick(starts);
        const GridPoint gc = rng.pick(goals);
        const auto path =
            try_path(scene, scene.grid.cell_center(sc), scene.grid.cell_center(gc));
        if (!path) continue;
        ep.path = *path;
        ep.start = Pose{ep.path.front(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.goal = Pose{ep.path.back(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.landmark = region->label;
        return ep;
      }
      case ActionKind::GoThrough: {
        const Region* region = rng.pick(eligible);
        const std::size_t i =
            static_cast<std::size_t>(rng.uniform_int(region->entrances.size()));
        std::size_t j =
            static_cast<std::size_t>(rng.uniform_int(region->entrances.size() - 1));
        if (j >= i) ++j;
        const Entrance& ea = region->entrances[i];
        const Entrance& eb = region->entrances[j];
        const auto starts = cells_near(scene, ea.midpoint, config.entrance_radius,
                                       [](const WorldPoint&) { return true; });
        const auto ends = cells_near(scene, eb.midpoint, config.entrance_radius,
                                     [](const WorldPoint&) { return true; });
        if (starts.empty() || ends.empty()) continue;
        const GridPoint sc = rng.pick(starts);
        const GridPoint gc = rng.pick(ends);
        if (sc == gc) continue;
        const auto path =
            try_path(scene, scene.grid.cell_center(sc), scene.grid.cell_center(gc));
        if (!path) continue;
        ep.path = *path;
        const std::size_t mid = vertex_at_fraction(ep.path, 0.5);
        ep.start = Pose{ep.path.front(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.goal = Pose{ep.path[mid], tangent_at(ep.path, mid)};
        ep.landmark = region->label;
        return ep;
      }
      case ActionKind::Exit: {
        const Region* region = rng.pick(eligible);
        const Entrance& entrance = rng.pick(region->entrances);
        const auto starts = cells_inside_region(scene, *region);
        const auto goals =
            cells_near(scene, entrance.midpoint, config.entrance_radius,
                       [&](const WorldPoint& w) { return !region->contains(w); });
        if (starts.empty() || goals.empty()) continue;
        const GridPoint sc = rng.pick(starts);
        const GridPoint gc = rng.pick(goals);
        const auto path =
            try_path(scene, scene.grid.cell_center(sc), scene.grid.cell_center(gc));
        if (!path) continue;
        ep.path = *path;
        ep.start = Pose{ep.path.front(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.goal = Pose{ep.path.back(), rng.uniform_real(0.0, 2.0 * kPi)};
        ep.landmark = region->label;
        return ep;
      }
    }
  }
  throw RetriesExhaustedError("sampling " + to_string(kind) + " on scene " + scene.id +
                              " exceeded " + std::to_string(config.max_attempts) +
                              " attempts");
}

std::vector<Episode> generate_dataset(const Scene& scene, ActionKind kind,
                                      std::uint64_t count, std::uint64_t seed,
                                      const SamplerConfig& config, bool parallel) {
  std::vector<Episode> episodes(count);
  std::exception_ptr first_error;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    if (first_error) continue;
    try {
      const std::uint64_t ep_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
      Rng rng(ep_seed);
      Episode ep = sample_episode(scene, kind, rng, config);
      ep.id = static_cast<std::uint64_t>(i);
      ep.seed = ep_seed;
      episodes[static_cast<std::size_t>(i)] = std::move(ep);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return episodes;
}

std::string check_episode(const Scene& scene, const Episode& ep,
                          const SamplerConfig& config) {
  if (ep.path.empty()) return "path is empty";
  if (euclidean(ep.path.front(), ep.start.position) > 1e-9)
    return "path[0] differs from start position";
  if (!scene.grid.is_free(scene.grid.world_to_grid(ep.start.position)))
    return "start is not navigable";
  if (!scene.grid.is_free(scene.grid.world_to_grid(ep.goal.position)))
    return "goal is not navigable";
  if (ep.start.heading < 0 || ep.start.heading >= 2 * kPi) return "start heading not normalized";
  if (ep.goal.heading < 0 || ep.goal.heading >= 2 * kPi) return "goal heading not normalized";

  const double total = polyline_length(ep.path);
  auto mid_ok = [&](double max_heading_dev, bool check_heading) -> std::string {
    const std::size_t mid = vertex_at_fraction(ep.path, 0.5);
    if (euclidean(ep.path[mid], ep.goal.position) > 1e-9)
      return "goal is not the mid-arc-length vertex";
    double cum = 0.0;
    for (std::size_t i = 1; i <= mid; ++i) cum += euclidean(ep.path[i - 1], ep.path[i]);
    if (std::fabs(cum - 0.5 * total) > scene.grid.resolution + 1e-9)
      return "goal departs from arc-length fraction 0.5 by more than one cell";
    if (check_heading) {
      const double tangent = tangent_at(ep.path, mid);
      if (angular_distance(ep.goal.heading, tangent) > max_heading_dev + 1e-9)
        return "goal heading deviates from the path tangent";
    }
    return "";
  };

  switch (ep.action) {
    case ActionKind::GoTo: {
      if (euclidean(ep.path.back(), ep.goal.position) > 1e-9)
        return "goal is not the path end";
      bool found = false;
      for (const auto& obj : scene.objects)
        if (obj.label == ep.landmark) found = true;
      if (!found) return "landmark does not name a scene object";
      return "";
    }
    case ActionKind::GoPast: {
      if (euclidean(ep.start.position, ep.path.back()) <= config.min_displacement)
        return "endpoint displacement not greater than 1.5 m";
      return mid_ok(config.heading_jitter, true);
    }
    case ActionKind::GoInto: {
      for (const auto& region : scene.regions) {
        if (region.label != ep.landmark) continue;
        const auto rs = region_containing(scene, ep.start.position);
        const auto rg = region_containing(scene, ep.goal.position);
        if (rs != region.id && rg == region.id &&
            min_entrance_distance(scene, region, ep.start.position) <=
                config.entrance_radius + 1e-9)
          return "";
      }
      return "no region satisfies the GoInto containment/entrance conditions";
    }
    case ActionKind::GoThrough: {
      const std::string mid_err = mid_ok(0.0, true);
      if (!mid_err.empty()) return mid_err;
      for (const auto& region : scene.regions) {
        if (region.label != ep.landmark || region.entrances.size() < 2) continue;
        for (std::size_t i = 0; i < region.entrances.size(); ++i)
          for (std::size_t j = 0; j < region.entrances.size(); ++j) {
            if (i == j) continue;
            const auto da =
                geodesic_distance(scene, ep.start.position, region.entrances[i].midpoint);
            const auto db =
                geodesic_distance(scene, ep.path.back(), region.entrances[j].midpoint);
            if (da && db && *da <= config.entrance_radius + 1e-9 &&
                *db <= config.entrance_radius + 1e-9)
              return "";
          }
      }
      return "start/end are not anchored to two distinct entrances";
    }
    case ActionKind::Exit: {
      for (const auto& region : scene.regions) {
        if (region.label != ep.landmark) continue;
        const auto rs = region_containing(scene, ep.start.position);
        const auto rg = region_containing(scene, ep.goal.position);
        if (rs == region.id && rg != region.id &&
            min_entrance_distance(scene, region, ep.goal.position) <=
                config.entrance_radius + 1e-9)
          return "";
      }
      return "no region satisfies the Exit containment/entrance conditions";
    }
  }
  return "unknown action kind";
}

namespace {

nlohmann::json pose_to_json(const Pose& p) {
  return {{"position", {p.position.x, p.position.y}}, {"heading", p.heading}};
}

Pose pose_from_json(const nlohmann::json& j) {
  return Pose{WorldPoint{j.at("position").at(0).get<double>(),
                         j.at("position").at(1).get<double>()},
              j.at("heading").get<double>()};
}

}  // namespace

std::string dataset_to_text(const std::string& scene_id, ActionKind kind,
                            std::uint64_t seed, const std::vector<Episode>& episodes) {
  std::ostringstream out;
  nlohmann::json header = {{"scene_id", scene_id},
                           {"kind", to_string(kind)},
                           {"seed", seed},
                           {"count", episodes.size()}};
  out << header.dump() << "\n";
  for (const auto& ep : episodes) {
    nlohmann::json j = {{"id", ep.id},
                        {"scene_id", ep.scene_id},
                        {"action", to_string(ep.action)},
                        {"landmark", ep.landmark},
                        {"start", pose_to_json(ep.start)},
                        {"goal", pose_to_json(ep.goal)},
                        {"seed", ep.seed}};
    nlohmann::json path = nlohmann::json::array();
    for (const auto& p : ep.path) path.push_back({p.x, p.y});
    j["path"] = path;
    out << j.dump() << "\n";
  }
  return out.str();
}

std::vector<Episode> dataset_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Episode> episodes;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("dataset line is not valid JSON: ") + e.what());
    }
    if (!header_seen) {
      header_seen = true;
      if (!j.contains("count")) throw SchemaError("dataset header line missing");
      continue;
    }
    try {
      Episode ep;
      ep.id = j.at("id").get<std::uint64_t>();
      ep.scene_id = j.at("scene_id").get<std::string>();
      ep.action = action_kind_from_string(j.at("action").get<std::string>());
      ep.landmark = j.at("landmark").get<std::string>();
      ep.start = pose_from_json(j.at("start"));
      ep.goal = pose_from_json(j.at("goal"));
      ep.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& p : j.at("path"))
        ep.path.push_back(WorldPoint{p.at(0).get<double>(), p.at(1).get<double>()});
      episodes.push_back(std::move(ep));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("dataset record: ") + e.what());
    }
  }
  if (!header_seen) throw SchemaError("dataset is empty (no header line)");
  return episodes;
}

}  // namespace a2nav
