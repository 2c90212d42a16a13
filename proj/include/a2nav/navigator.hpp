#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "a2nav/reward.hpp"
#include "a2nav/rng.hpp"
#include "a2nav/scene.hpp"
#include "a2nav/types.hpp"

namespace a2nav {

enum class AgentAction { Stop, Forward, TurnLeft, TurnRight };

std::string to_string(AgentAction action);
AgentAction agent_action_from_string(const std::string& name);

inline constexpr double kForwardStep = 0.25;   // meters
inline constexpr double kTurnStep = deg_to_rad(30.0);
inline constexpr double kAgentRadius = 0.1;    // meters
inline constexpr double kWaypointRadius = 0.25;
inline constexpr double kBearingDeadband = deg_to_rad(15.0);

struct Observation {
  Pose pose;
  const Scene* scene = nullptr;
  SubTask subtask;
  int steps_in_subtask = 0;
  // Goal pose of the current sub-task when executing a sampled episode;
  // the desk-scale stand-in for the paper's goal image. Absent when the
  // agent runs from a bare instruction.
  std::optional<Pose> goal;
};

struct ExecutorConfig {
  int max_subtask_steps = 100;  // m_s
  int max_episode_steps = 500;  // m_e
  double success_radius = 3.0;  // meters (VLN default)
};

enum class TrajectoryStatus { AllSubtasksDone, EpisodeBudgetExhausted, Error };

struct StepRecord {
  int subtask_index = 0;
  AgentAction action = AgentAction::Stop;
  Pose pose_before;
  Pose pose_after;
  double dtg = 0.0;  // after the action; 0 when no goal pose is known
  double atg = 0.0;
  RewardComponents reward;
};

struct Trajectory {
  std::string id;
  Pose start;
  std::vector<StepRecord> steps;
  TrajectoryStatus status = TrajectoryStatus::AllSubtasksDone;
  int error_subtask = -1;
  std::string error_message;

  Pose final_pose() const { return steps.empty() ? start : steps.back().pose_after; }
  double traveled() const {
    double p = 0.0;
    for (const auto& s : steps) p += euclidean(s.pose_before.position, s.pose_after.position);
    return p;
  }
};

// Agent kinematics: Forward displaces 0.25 m along heading unless the swept
// 0.1 m disc hits a Blocked cell; turns are exactly +-30 degrees.
Pose apply_action(const Scene& scene, const Pose& pose, AgentAction action);

bool disc_blocked(const Scene& scene, const WorldPoint& center, double radius);

// Local controller: turn while the bearing error exceeds 15 degrees
// (TurnRight on the exact-rear tie), otherwise Forward; Stop within 0.25 m.
AgentAction waypoint_follow(const Scene& scene, const Pose& pose,
                            const WorldPoint& waypoint);

// Pose the agent held k steps ago (clamped to the trajectory start).
Pose backtrack(const Trajectory& trajectory, int k = 15);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_subtask(const Scene& scene, const Pose& pose, const SubTask& subtask,
                             const std::optional<Pose>& goal) = 0;
  virtual AgentAction step(const Observation& obs) = 0;
};

// Map-oracle navigator realizing each action demand's semantics with
// waypoint following along planned paths.
std::unique_ptr<Policy> make_oracle_policy();
// Landmark-only ablation: treats every sub-task as GoTo toward the nearest
// label match and ignores goal poses.
std::unique_ptr<Policy> make_goto_only_policy();
std::unique_ptr<Policy> make_random_policy(std::uint64_t seed);

struct GreedyConfig {
  double stop_threshold = 0.8;
  int backtrack_after = 15;  // steps without any landmark in view
  int backtrack_k = 15;
  bool backtracking = false;
};
std::unique_ptr<Policy> make_greedy_policy(std::uint64_t seed, GreedyConfig config = {});

std::unique_ptr<Policy> make_policy(const std::string& name, std::uint64_t seed);

// Oracle visibility score for the greedy baseline: 1/(1+d) with d the
// geodesic distance to the nearest landmark match inside a 90 degree cone
// around `direction`; 0 when nothing is visible.
double greedy_direction_score(const Scene& scene, const WorldPoint& position,
                              double direction, const SubTask& subtask);

// Sequential sub-task execution: advance on STOP or after m_s steps, halt
// after m_e total steps. Goals, when provided, are per-sub-task.
Trajectory execute_instruction(const Scene& scene, const Pose& start,
                               const std::vector<SubTask>& subtasks, Policy& policy,
                               const ExecutorConfig& config,
                               const std::vector<std::optional<Pose>>& goals = {});

// Trace file: one JSON line per step plus a terminal status record.
std::string trajectory_to_text(const Trajectory& trajectory);
Trajectory trajectory_from_text(const std::string& text);

}  // namespace a2nav
