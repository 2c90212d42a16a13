#include "a2nav/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "a2nav/errors.hpp"
#include "a2nav/parser.hpp"
#include "json.hpp"

namespace a2nav {

namespace {

constexpr double kSweepStep = 0.05;  // collision sampling along a Forward move

WorldPoint along(const WorldPoint& from, double heading, double dist) {
  return WorldPoint{from.x + dist * std::cos(heading), from.y + dist * std::sin(heading)};
}

double bearing_to(const Pose& pose, const WorldPoint& target) {
  return wrap_angle(std::atan2(target.y - pose.position.y, target.x - pose.position.x) -
                    pose.heading);
}

bool labels_equal(const std::string& a, const std::string& b) {
  return normalize_phrase(a) == normalize_phrase(b);
}

}  // namespace

std::string to_string(AgentAction action) {
  switch (action) {
    case AgentAction::Stop: return "stop";
    case AgentAction::Forward: return "forward";
    case AgentAction::TurnLeft: return "turn_left";
    case AgentAction::TurnRight: return "turn_right";
  }
  return "stop";
}

AgentAction agent_action_from_string(const std::string& name) {
  for (AgentAction a : {AgentAction::Stop, AgentAction::Forward, AgentAction::TurnLeft,
                        AgentAction::TurnRight})
    if (to_string(a) == name) return a;
  throw TraceFormatError("unknown agent action: " + name);
}

bool disc_blocked(const Scene& scene, const WorldPoint& center, double radius) {
  const OccupancyGrid& grid = scene.grid;
  const GridPoint lo = grid.world_to_grid(WorldPoint{center.x - radius, center.y - radius});
  const GridPoint hi = grid.world_to_grid(WorldPoint{center.x + radius, center.y + radius});
  for (int r = lo.row; r <= hi.row; ++r)
    for (int c = lo.col; c <= hi.col; ++c) {
      const GridPoint g{c, r};
      if (grid.is_free(g)) continue;
      // Distance from the disc center to the cell's rectangle.
      const double x0 = grid.origin.x + c * grid.resolution;
      const double y0 = grid.origin.y + r * grid.resolution;
      const double dx = std::max({x0 - center.x, 0.0, center.x - (x0 + grid.resolution)});
      const double dy = std::max({y0 - center.y, 0.0, center.y - (y0 + grid.resolution)});
      if (std::hypot(dx, dy) < radius) return true;
    }
  return false;
}

Pose apply_action(const Scene& scene, const Pose& pose, AgentAction action) {
  switch (action) {
    case AgentAction::Stop:
      return pose;
    case AgentAction::TurnLeft:
      return Pose{pose.position, normalize_heading(pose.heading + kTurnStep)};
    case AgentAction::TurnRight:
      return Pose{pose.position, normalize_heading(pose.heading - kTurnStep)};
    case AgentAction::Forward: {
      const WorldPoint target = along(pose.position, pose.heading, kForwardStep);
      const int samples = static_cast<int>(std::ceil(kForwardStep / kSweepStep));
      for (int i = 1; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const WorldPoint p{pose.position.x + t * (target.x - pose.position.x),
                           pose.position.y + t * (target.y - pose.position.y)};
        if (!scene.grid.contains_world(p) || disc_blocked(scene, p, kAgentRadius))
          return pose;  // collision: no displacement
      }
      return Pose{target, pose.heading};
    }
  }
  return pose;
}

AgentAction waypoint_follow(const Scene& scene, const Pose& pose,
                            const WorldPoint& waypoint) {
  (void)scene;
  if (euclidean(pose.position, waypoint) <= kWaypointRadius) return AgentAction::Stop;
  const double err = bearing_to(pose, waypoint);
  if (std::fabs(err) > kBearingDeadband) {
    if (std::fabs(std::fabs(err) - kPi) < 1e-12) return AgentAction::TurnRight;  // rear tie
    return err > 0 ? AgentAction::TurnLeft : AgentAction::TurnRight;
  }
  return AgentAction::Forward;
}

Pose backtrack(const Trajectory& trajectory, int k) {
  const int len = static_cast<int>(trajectory.steps.size());
  const int idx = len - k;
  if (idx >= len) return trajectory.final_pose();  // k = 0
  if (idx <= 0) return trajectory.start;
  return trajectory.steps[static_cast<std::size_t>(idx)].pose_before;
}

// ---------------------------------------------------------------------------
// Oracle navigator

namespace {

const ObjectInstance* nearest_matching_object(const Scene& scene, const WorldPoint& from,
                                              const std::string& label) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(from)});
  const ObjectInstance* best = nullptr;
  double best_dist = 0.0;
  bool best_geodesic = false;
  for (const auto& obj : scene.objects) {
    if (!labels_equal(obj.label, label)) continue;
    const auto d = field.meters_at(scene.grid.world_to_grid(obj.position));
    if (d) {
      if (!best || !best_geodesic || *d < best_dist) {
        best = &obj;
        best_dist = *d;
        best_geodesic = true;
      }
    } else if (!best_geodesic) {
      const double e = euclidean(obj.position, from);
      if (!best || e < best_dist) {
        best = &obj;
        best_dist = e;
      }
    }
  }
  return best;
}

const Entrance* nearest_entrance(const Scene& scene, const Region& region,
                                 const WorldPoint& from) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(from)});
  const Entrance* best = nullptr;
  double best_dist = 0.0;
  for (const auto& e : region.entrances) {
    const auto d = field.meters_at(scene.grid.world_to_grid(e.midpoint));
    const double dist = d ? *d : euclidean(e.midpoint, from) + 1e6;
    if (!best || dist < best_dist) {
      best = &e;
      best_dist = dist;
    }
  }
  return best;
}

const Region* matching_region(const Scene& scene, const std::string& label,
                              std::size_t min_entrances, const WorldPoint& from,
                              bool prefer_containing) {
  const Region* best = nullptr;
  double best_dist = 0.0;
  for (const auto& region : scene.regions) {
    if (!labels_equal(region.label, label)) continue;
    if (region.entrances.size() < min_entrances && !prefer_containing) continue;
    if (prefer_containing && region.contains(from) &&
        region_containing(scene, from) == region.id)
      return &region;
    const Entrance* e = region.entrances.empty() ? nullptr
                                                 : nearest_entrance(scene, region, from);
    const double d = e ? euclidean(e->midpoint, from)
                       : euclidean(WorldPoint{(region.xmin + region.xmax) / 2,
                                              (region.ymin + region.ymax) / 2},
                                   from);
    if (!best || d < best_dist) {
      best = &region;
      best_dist = d;
    }
  }
  return best;
}

// Free cell inside the region's bbox (owned by it under the declaration-order
// tie-break) closest to the bbox center.
std::optional<WorldPoint> region_interior_point(const Scene& scene, const Region& region) {
  const WorldPoint center{(region.xmin + region.xmax) / 2, (region.ymin + region.ymax) / 2};
  std::optional<WorldPoint> best;
  double best_dist = 0.0;
  for (const auto& g : scene.free_cells) {
    const WorldPoint w = scene.grid.cell_center(g);
    if (!region.contains(w) || region_containing(scene, w) != region.id) continue;
    const double d = euclidean(w, center);
    if (!best || d < best_dist) {
      best = w;
      best_dist = d;
    }
  }
  return best;
}

// Farthest navigable point along `dir` from `from` with distance in
// [d_min, d_max], reachable from `from`, satisfying `pred`.
std::optional<WorldPoint> point_along(const Scene& scene, const WorldPoint& from,
                                      double dir, double d_min, double d_max,
                                      const std::function<bool(const WorldPoint&)>& pred) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(from)});
  for (double d = d_max; d >= d_min - 1e-9; d -= scene.grid.resolution / 2) {
    const WorldPoint p = along(from, dir, d);
    if (!scene.grid.contains_world(p)) continue;
    const GridPoint g = scene.grid.world_to_grid(p);
    if (!scene.grid.is_free(g) || !field.is_reached(g)) continue;
    const WorldPoint c = scene.grid.cell_center(g);
    if (pred(c)) return c;
  }
  return std::nullopt;
}

// Any free cell outside the region within `radius` geodesic of the entrance.
std::optional<WorldPoint> point_outside_near(const Scene& scene, const Region& region,
                                             const Entrance& entrance, double radius) {
  const DistanceField field = compute_distance_field(
      scene.grid, {scene.grid.world_to_grid(entrance.midpoint)});
  std::optional<WorldPoint> best;
  double best_dist = 0.0;
  for (const auto& g : scene.free_cells) {
    const auto d = field.meters_at(g);
    if (!d || *d > radius) continue;
    const WorldPoint w = scene.grid.cell_center(g);
    if (region.contains(w)) continue;
    // Prefer the farthest outside point within the radius: a clean exit.
    if (!best || *d > best_dist) {
      best = w;
      best_dist = *d;
    }
  }
  return best;
}

class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(bool goto_only = false) : goto_only_(goto_only) {}

  void begin_subtask(const Scene& scene, const Pose& pose, const SubTask& subtask,
                     const std::optional<Pose>& goal) override {
    scene_ = &scene;
    anchors_.clear();
    leg_.clear();
    anchor_idx_ = 0;
    leg_idx_ = 0;
    recovery_dir_.reset();


    SubTask task = subtask;
    std::optional<Pose> task_goal = goal;
    if (goto_only_) {
      task.action = ActionKind::GoTo;
      task.landmark_kind = LandmarkKind::Object;
      task_goal.reset();  // landmark-only: ignore the goal pose entirely
    }
    build_anchors(scene, pose, task, task_goal);
    if (!anchors_.empty()) plan_leg(pose);
  }

  AgentAction step(const Observation& obs) override {
    if (anchor_idx_ >= anchors_.size()) return AgentAction::Stop;
    const Scene& scene = *scene_;
    const Pose& pose = obs.pose;

    // Recovery with hysteresis: keep turning one way until a clear Forward
    // roughly toward the waypoint can be committed, so the follower's own
    // turn preference cannot oscillate against the obstacle.
    if (recovery_dir_) {
      if (!is_forward_blocked(scene, pose) &&
          std::fabs(bearing_to(pose, leg_[leg_idx_])) <= kPi / 2) {
        recovery_dir_.reset();
        return AgentAction::Forward;
      }
      return *recovery_dir_;
    }

    // Anchor reached: move on to the next leg (or stop on the last anchor).
    while (anchor_idx_ < anchors_.size() &&
           euclidean(pose.position, anchors_[anchor_idx_]) <= kWaypointRadius) {
      ++anchor_idx_;
      if (anchor_idx_ >= anchors_.size()) return AgentAction::Stop;
      plan_leg(pose);
    }

    AgentAction act = follow_leg(pose);
    if (act == AgentAction::Forward && is_forward_blocked(scene, pose)) {
      plan_leg(pose);  // replan around whatever we grazed
      act = follow_leg(pose);
      if (act == AgentAction::Forward && is_forward_blocked(scene, pose)) {
        recovery_dir_ = bearing_to(pose, leg_[leg_idx_]) >= 0 ? AgentAction::TurnLeft
                                                              : AgentAction::TurnRight;
        return *recovery_dir_;
      }
    }
    return act;
  }

 private:
  static bool is_forward_blocked(const Scene& scene, const Pose& pose) {
    const Pose next = apply_action(scene, pose, AgentAction::Forward);
    return euclidean(next.position, pose.position) < 1e-12;
  }

  void plan_leg(const Pose& pose) {
    leg_ = plan_path(*scene_, pose.position, anchors_[anchor_idx_]);
    leg_idx_ = 0;
  }

  static bool segment_clear(const Scene& scene, const WorldPoint& a, const WorldPoint& b) {
    const double len = euclidean(a, b);
    const int samples = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
    for (int i = 1; i <= samples; ++i) {
      const double t = static_cast<double>(i) / samples;
      const WorldPoint p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      if (!scene.grid.contains_world(p) || disc_blocked(scene, p, kAgentRadius))
        return false;
    }
    return true;
  }

  // Steers toward the nearest unreached leg vertex; never emits Stop while
  // the anchor is still ahead (the anchor check in step() owns stopping).
  // A vertex may only be skipped when the straight line to its successor is
  // collision-free, so the planner's corner-avoidance is never shortcut.
  AgentAction follow_leg(const Pose& pose) {
    while (leg_idx_ + 1 < leg_.size() &&
           euclidean(pose.position, leg_[leg_idx_]) <= kWaypointRadius &&
           segment_clear(*scene_, pose.position, leg_[leg_idx_ + 1]))
      ++leg_idx_;
    AgentAction act = waypoint_follow(*scene_, pose, leg_[leg_idx_]);
    if (act == AgentAction::Stop && leg_idx_ + 1 < leg_.size()) {
      // Within reach of the vertex but the shortcut past it is unsafe:
      // approach the vertex itself, ignoring the follower's stop radius.
      const double d = euclidean(pose.position, leg_[leg_idx_]);
      if (d > 1e-9) {
        const double err = bearing_to(pose, leg_[leg_idx_]);
        act = std::fabs(err) > kBearingDeadband
                  ? (err > 0 ? AgentAction::TurnLeft : AgentAction::TurnRight)
                  : AgentAction::Forward;
      } else {
        ++leg_idx_;
        act = waypoint_follow(*scene_, pose, leg_[leg_idx_]);
      }
    }
    if (act == AgentAction::Stop)
      act = waypoint_follow(*scene_, pose, anchors_[anchor_idx_]);
    if (act == AgentAction::Stop)  // anchor just inside the reach radius
      act = AgentAction::Forward;
    return act;
  }

  void build_anchors(const Scene& scene, const Pose& pose, const SubTask& task,
                     const std::optional<Pose>& goal) {
    if (goal) {
      // Episode mode: the sampled goal already realizes the action demand's
      // geometry, so the shortest route to it is the right answer.
      anchors_ = {goal->position};
      return;
    }
    switch (task.action) {
      case ActionKind::GoTo: {
        const ObjectInstance* obj =
            nearest_matching_object(scene, pose.position, task.landmark);
        if (!obj) throw LandmarkNotFoundError("no object labeled '" + task.landmark + "'");
        anchors_ = {obj->position};
        return;
      }
      case ActionKind::GoPast: {
        const ObjectInstance* obj =
            nearest_matching_object(scene, pose.position, task.landmark);
        if (!obj) throw LandmarkNotFoundError("no object labeled '" + task.landmark + "'");
        // Continue past the object along the approach direction.
        const auto approach = plan_path(scene, pose.position, obj->position);
        double dir = pose.heading;
        if (approach.size() >= 2) {
          const WorldPoint& prev = approach[approach.size() - 2];
          dir = std::atan2(obj->position.y - prev.y, obj->position.x - prev.x);
        }
        const auto cont = point_along(scene, obj->position, dir, 0.5, 1.5,
                                      [](const WorldPoint&) { return true; });
        anchors_ = {obj->position};
        if (cont) anchors_.push_back(*cont);
        return;
      }
      case ActionKind::GoInto: {
        const Region* region =
            matching_region(scene, task.landmark, 1, pose.position, false);
        if (!region || region->entrances.empty())
          throw LandmarkNotFoundError("no enterable region labeled '" + task.landmark +
                                      "'");
        const Entrance* entrance = nearest_entrance(scene, *region, pose.position);
        anchors_ = {entrance->midpoint};
        const auto interior = region_interior_point(scene, *region);
        if (!interior)
          throw UnreachableError("region '" + task.landmark + "' has no interior cell");
        anchors_.push_back(*interior);
        return;
      }
      case ActionKind::GoThrough: {
        const Region* region =
            matching_region(scene, task.landmark, 2, pose.position, false);
        if (!region || region->entrances.size() < 2)
          throw LandmarkNotFoundError("no region labeled '" + task.landmark +
                                      "' with two entrances");
        const Entrance* ea = nearest_entrance(scene, *region, pose.position);
        anchors_ = {ea->midpoint};
        const auto interior = region_interior_point(scene, *region);
        if (interior) anchors_.push_back(*interior);
        const Entrance* eb = nullptr;
        double best = -1.0;
        for (const auto& e : region->entrances) {
          if (&e == ea) continue;
          const double d = euclidean(e.midpoint, ea->midpoint);
          if (d > best) {
            best = d;
            eb = &e;
          }
        }
        anchors_.push_back(eb->midpoint);
        const auto out = point_outside_near(scene, *region, *eb, 1.0);
        if (out) anchors_.push_back(*out);
        return;
      }
      case ActionKind::Exit: {
        const Region* region =
            matching_region(scene, task.landmark, 0, pose.position, true);
        if (!region)
          throw LandmarkNotFoundError("no region labeled '" + task.landmark + "'");
        const bool inside = region->contains(pose.position) &&
                            region_containing(scene, pose.position) == region->id;
        if (!inside) {
          anchors_.clear();  // already outside: stop immediately
          return;
        }
        if (region->entrances.empty())
          throw UnreachableError("region '" + task.landmark + "' has no entrance");
        const Entrance* entrance = nearest_entrance(scene, *region, pose.position);
        anchors_ = {entrance->midpoint};
        const auto out = point_outside_near(scene, *region, *entrance, 1.5);
        if (!out)
          throw UnreachableError("no navigable cell outside region '" + task.landmark +
                                 "'");
        anchors_.push_back(*out);
        return;
      }
    }
  }

  const Scene* scene_ = nullptr;
  bool goto_only_ = false;
  std::vector<WorldPoint> anchors_;
  std::size_t anchor_idx_ = 0;
  std::vector<WorldPoint> leg_;
  std::size_t leg_idx_ = 0;
  std::optional<AgentAction> recovery_dir_;
};

class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  void begin_subtask(const Scene&, const Pose&, const SubTask&,
                     const std::optional<Pose>&) override {}
  AgentAction step(const Observation&) override {
    switch (rng_.uniform_int(4)) {
      case 0: return AgentAction::Stop;
      case 1: return AgentAction::Forward;
      case 2: return AgentAction::TurnLeft;
      default: return AgentAction::TurnRight;
    }
  }

 private:
  Rng rng_;
};

class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(std::uint64_t seed, GreedyConfig config) : rng_(seed), config_(config) {}

  void begin_subtask(const Scene& scene, const Pose& pose, const SubTask& subtask,
                     const std::optional<Pose>&) override {
    scene_ = &scene;
    subtask_ = subtask;
    waypoint_.reset();
    bt_target_.reset();
    no_sight_ = 0;
    history_.id = "greedy";
    history_.start = pose;
    history_.steps.clear();
  }

  AgentAction step(const Observation& obs) override {
    const Scene& scene = *scene_;
    const Pose& pose = obs.pose;
    record_pose(pose);

    double best = -1.0;
    double best_dir = pose.heading;
    for (int k = 0; k < 4; ++k) {
      const double dir = normalize_heading(pose.heading + k * kPi / 2);
      const double score = greedy_direction_score(scene, pose.position, dir, subtask_);
      if (score > best) {
        best = score;
        best_dir = dir;
      }
    }
    if (best > config_.stop_threshold) return emit(pose, AgentAction::Stop);

    if (config_.backtracking) {
      if (best <= 0.0)
        ++no_sight_;
      else
        no_sight_ = 0;
      if (!bt_target_ && no_sight_ >= config_.backtrack_after) {
        bt_target_ = backtrack(history_, config_.backtrack_k).position;
        waypoint_.reset();
        no_sight_ = 0;
      }
      if (bt_target_) {
        if (euclidean(pose.position, *bt_target_) <= kWaypointRadius) {
          bt_target_.reset();
        } else {
          return emit(pose, follow(pose, *bt_target_));
        }
      }
    }

    if (!waypoint_ || euclidean(pose.position, *waypoint_) <= kWaypointRadius)
      waypoint_ = pick_waypoint(pose, best > 0.0 ? std::optional<double>(best_dir)
                                                 : std::nullopt);
    if (!waypoint_) return emit(pose, AgentAction::TurnRight);  // boxed in: scan
    return emit(pose, follow(pose, *waypoint_));
  }

 private:
  AgentAction follow(const Pose& pose, const WorldPoint& target) {
    AgentAction act = waypoint_follow(*scene_, pose, target);
    if (act == AgentAction::Stop) {
      // Waypoints are exploration carrots, never sub-task stops.
      waypoint_.reset();
      return AgentAction::TurnRight;
    }
    if (act == AgentAction::Forward) {
      const Pose next = apply_action(*scene_, pose, AgentAction::Forward);
      if (euclidean(next.position, pose.position) < 1e-12) {
        waypoint_.reset();
        return AgentAction::TurnRight;
      }
    }
    return act;
  }

  std::optional<WorldPoint> pick_waypoint(const Pose& pose, std::optional<double> dir) {
    for (int tries = 0; tries < 8; ++tries) {
      const double heading =
          dir && tries == 0
              ? *dir
              : normalize_heading(pose.heading + rng_.uniform_int(4) * kPi / 2);
      const double want = rng_.uniform_real(1.0, 3.0);
      for (double d = want; d >= 0.5; d -= scene_->grid.resolution) {
        const WorldPoint p = along(pose.position, heading, d);
        if (!scene_->grid.contains_world(p)) continue;
        const GridPoint g = scene_->grid.world_to_grid(p);
        if (scene_->grid.is_free(g)) return scene_->grid.cell_center(g);
      }
    }
    return std::nullopt;
  }

  void record_pose(const Pose& pose) {
    StepRecord rec;
    rec.pose_before = history_.steps.empty() ? history_.start : history_.final_pose();
    rec.pose_after = pose;
    history_.steps.push_back(rec);
  }

  AgentAction emit(const Pose&, AgentAction act) { return act; }

  const Scene* scene_ = nullptr;
  SubTask subtask_;
  Rng rng_;
  GreedyConfig config_;
  std::optional<WorldPoint> waypoint_;
  std::optional<WorldPoint> bt_target_;
  int no_sight_ = 0;
  Trajectory history_;
};

}  // namespace

double greedy_direction_score(const Scene& scene, const WorldPoint& position,
                              double direction, const SubTask& subtask) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(position)});
  double best = 0.0;
  auto consider = [&](const WorldPoint& p) {
    const double bearing = std::atan2(p.y - position.y, p.x - position.x);
    if (std::fabs(wrap_angle(bearing - direction)) > kPi / 4 + 1e-12) return;
    const auto d = field.meters_at(scene.grid.world_to_grid(p));
    if (!d) return;
    best = std::max(best, 1.0 / (1.0 + *d));
  };
  if (subtask.landmark_kind == LandmarkKind::Object) {
    for (const auto& obj : scene.objects)
      if (labels_equal(obj.label, subtask.landmark)) consider(obj.position);
  } else {
    for (const auto& region : scene.regions)
      if (labels_equal(region.label, subtask.landmark))
        for (const auto& e : region.entrances) consider(e.midpoint);
  }
  return best;
}

std::unique_ptr<Policy> make_oracle_policy() { return std::make_unique<OraclePolicy>(); }
std::unique_ptr<Policy> make_goto_only_policy() {
  return std::make_unique<OraclePolicy>(true);
}
std::unique_ptr<Policy> make_random_policy(std::uint64_t seed) {
  return std::make_unique<RandomPolicy>(seed);
}
std::unique_ptr<Policy> make_greedy_policy(std::uint64_t seed, GreedyConfig config) {
  return std::make_unique<GreedyPolicy>(seed, config);
}

std::unique_ptr<Policy> make_policy(const std::string& name, std::uint64_t seed) {
  if (name == "oracle") return make_oracle_policy();
  if (name == "goto-only") return make_goto_only_policy();
  if (name == "random") return make_random_policy(seed);
  if (name == "greedy") return make_greedy_policy(seed);
  if (name == "greedy-backtrack") {
    GreedyConfig config;
    config.backtracking = true;
    return make_greedy_policy(seed, config);
  }
  throw SchemaError("unknown policy: " + name);
}

Trajectory execute_instruction(const Scene& scene, const Pose& start,
                               const std::vector<SubTask>& subtasks, Policy& policy,
                               const ExecutorConfig& config,
                               const std::vector<std::optional<Pose>>& goals) {
  if (config.max_subtask_steps <= 0 || config.max_subtask_steps > config.max_episode_steps)
    throw SchemaError("executor budgets must satisfy 0 < m_s <= m_e");

  Trajectory traj;
  traj.start = start;
  Pose pose = start;
  int total_steps = 0;

  for (std::size_t si = 0; si < subtasks.size(); ++si) {
    const std::optional<Pose> goal = si < goals.size() ? goals[si] : std::nullopt;
    std::optional<DistanceField> goal_field;
    if (goal)
      goal_field = compute_distance_field(scene.grid,
                                          {scene.grid.world_to_grid(goal->position)});
    try {
      policy.begin_subtask(scene, pose, subtasks[si], goal);
    } catch (const Error& e) {
      traj.status = TrajectoryStatus::Error;
      traj.error_subtask = static_cast<int>(si);
      traj.error_message = e.what();
      return traj;
    }

    int steps_in_subtask = 0;
    while (true) {
      if (total_steps == config.max_episode_steps) {
        traj.status = TrajectoryStatus::EpisodeBudgetExhausted;
        return traj;
      }
      Observation obs{pose, &scene, subtasks[si], steps_in_subtask, goal};
      AgentAction act;
      try {
        act = policy.step(obs);
      } catch (const Error& e) {
        traj.status = TrajectoryStatus::Error;
        traj.error_subtask = static_cast<int>(si);
        traj.error_message = e.what();
        return traj;
      }

      StepRecord rec;
      rec.subtask_index = static_cast<int>(si);
      rec.action = act;
      rec.pose_before = pose;
      pose = apply_action(scene, pose, act);
      rec.pose_after = pose;
      if (goal) {
        const auto d = goal_field->meters_at(scene.grid.world_to_grid(pose.position));
        rec.dtg = d ? *d : euclidean(pose.position, goal->position);
        rec.atg = angular_distance(pose.heading, goal->heading);
      }
      traj.steps.push_back(rec);
      ++total_steps;
      ++steps_in_subtask;

      if (act == AgentAction::Stop || steps_in_subtask == config.max_subtask_steps) break;
    }
  }
  traj.status = TrajectoryStatus::AllSubtasksDone;
  return traj;
}

// ---------------------------------------------------------------------------
// Trace I/O

namespace {

const char* status_name(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::AllSubtasksDone: return "all_subtasks_done";
    case TrajectoryStatus::EpisodeBudgetExhausted: return "episode_budget_exhausted";
    case TrajectoryStatus::Error: return "error";
  }
  return "error";
}

TrajectoryStatus status_from_name(const std::string& name) {
  for (TrajectoryStatus s :
       {TrajectoryStatus::AllSubtasksDone, TrajectoryStatus::EpisodeBudgetExhausted,
        TrajectoryStatus::Error})
    if (status_name(s) == name) return s;
  throw TraceFormatError("unknown trajectory status: " + name);
}

nlohmann::json pose_json(const Pose& p) {
  return {{"position", {p.position.x, p.position.y}}, {"heading", p.heading}};
}

Pose pose_from(const nlohmann::json& j) {
  return Pose{WorldPoint{j.at("position").at(0).get<double>(),
                         j.at("position").at(1).get<double>()},
              j.at("heading").get<double>()};
}

}  // namespace

std::string trajectory_to_text(const Trajectory& traj) {
  std::ostringstream out;
  nlohmann::json header = {{"record", "header"},
                           {"id", traj.id},
                           {"start", pose_json(traj.start)}};
  out << header.dump() << "\n";
  for (const auto& s : traj.steps) {
    nlohmann::json j = {{"record", "step"},
                        {"subtask_index", s.subtask_index},
                        {"action", to_string(s.action)},
                        {"pose_before", pose_json(s.pose_before)},
                        {"pose_after", pose_json(s.pose_after)},
                        {"dtg", s.dtg},
                        {"atg", s.atg},
                        {"reward",
                         {{"r_success", s.reward.r_success},
                          {"r_angle_success", s.reward.r_angle_success},
                          {"neg_delta_dtg", s.reward.neg_delta_dtg},
                          {"neg_delta_atg", s.reward.neg_delta_atg},
                          {"r_slack", s.reward.r_slack},
                          {"total", s.reward.total}}}};
    out << j.dump() << "\n";
  }
  nlohmann::json terminal = {{"record", "status"},
                             {"status", status_name(traj.status)},
                             {"error_subtask", traj.error_subtask},
                             {"error_message", traj.error_message}};
  out << terminal.dump() << "\n";
  return out.str();
}

Trajectory trajectory_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Trajectory traj;
  bool header_seen = false, status_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw TraceFormatError("trace line is not valid JSON");
    try {
      const std::string record = j.at("record").get<std::string>();
      if (record == "header") {
        traj.id = j.at("id").get<std::string>();
        traj.start = pose_from(j.at("start"));
        header_seen = true;
      } else if (record == "step") {
        StepRecord s;
        s.subtask_index = j.at("subtask_index").get<int>();
        s.action = agent_action_from_string(j.at("action").get<std::string>());
        s.pose_before = pose_from(j.at("pose_before"));
        s.pose_after = pose_from(j.at("pose_after"));
        s.dtg = j.at("dtg").get<double>();
        s.atg = j.at("atg").get<double>();
        const auto& r = j.at("reward");
        s.reward.r_success = r.at("r_success").get<double>();
        s.reward.r_angle_success = r.at("r_angle_success").get<double>();
        s.reward.neg_delta_dtg = r.at("neg_delta_dtg").get<double>();
        s.reward.neg_delta_atg = r.at("neg_delta_atg").get<double>();
        s.reward.r_slack = r.at("r_slack").get<double>();
        s.reward.total = r.at("total").get<double>();
        traj.steps.push_back(s);
      } else if (record == "status") {
        traj.status = status_from_name(j.at("status").get<std::string>());
        traj.error_subtask = j.at("error_subtask").get<int>();
        traj.error_message = j.at("error_message").get<std::string>();
        status_seen = true;
      } else {
        throw TraceFormatError("unknown trace record type: " + record);
      }
    } catch (const nlohmann::json::exception& e) {
      throw TraceFormatError(std::string("trace record: ") + e.what());
    }
  }
  if (!header_seen || !status_seen)
    throw TraceFormatError("trace is missing its header or status record");
  return traj;
}

}  // namespace a2nav
