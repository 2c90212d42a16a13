#include "a2nav/eval.hpp"

#include <algorithm>
#include <cmath>

#include "a2nav/errors.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace a2nav {

bool episode_success(const Scene& scene, const Trajectory& trajectory, const Pose& goal,
                     double radius, bool lenient) {
  const bool stopped =
      (!trajectory.steps.empty() && trajectory.steps.back().action == AgentAction::Stop) ||
      trajectory.status == TrajectoryStatus::AllSubtasksDone;
  if (!lenient && !stopped) return false;
  if (trajectory.status == TrajectoryStatus::Error) return false;
  const Pose final = trajectory.final_pose();
  const auto d = geodesic_distance(scene, final.position, goal.position);
  const double dist = d ? *d : euclidean(final.position, goal.position);
  return dist <= radius;
}

double success_rate(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw EmptyResultSetError("success rate over zero episodes");
  double hits = 0.0;
  for (const auto& r : results) hits += r.success ? 1.0 : 0.0;
  return 100.0 * hits / static_cast<double>(results.size());
}

double spl(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw EmptyResultSetError("SPL over zero episodes");
  double sum = 0.0;
  for (const auto& r : results) sum += r.spl_term;
  return 100.0 * sum / static_cast<double>(results.size());
}

double csr(double sr_a, double sr_b) {
  if (sr_a < 0.0 || sr_b < 0.0) throw SchemaError("CSR inputs must be non-negative");
  const double hi = std::max(sr_a, sr_b);
  if (hi == 0.0) return 100.0;  // identical (non-)performance
  return (1.0 - std::fabs(sr_a - sr_b) / hi) * 100.0;
}

void annotate_rewards(const Scene& scene, Trajectory& trajectory, const Pose& goal,
                      const RewardConfig& config) {
  const DistanceField field =
      compute_distance_field(scene.grid, {scene.grid.world_to_grid(goal.position)});
  auto dtg_of = [&](const Pose& p) {
    const auto d = field.meters_at(scene.grid.world_to_grid(p.position));
    return d ? *d : euclidean(p.position, goal.position);
  };
  auto atg_of = [&](const Pose& p) { return angular_distance(p.heading, goal.heading); };

  double dtg_prev = dtg_of(trajectory.start);
  double atg_prev = atg_of(trajectory.start);
  for (auto& step : trajectory.steps) {
    step.dtg = dtg_of(step.pose_after);
    step.atg = atg_of(step.pose_after);
    step.reward = step_reward(dtg_prev, atg_prev, step.dtg, step.atg,
                              step.action == AgentAction::Stop, config);
    dtg_prev = step.dtg;
    atg_prev = step.atg;
  }
}

EvalResult evaluate(const Scene& scene, const std::vector<Episode>& episodes,
                    const PolicyFactory& make_policy, const EvalConfig& config) {
  if (episodes.empty()) throw EmptyResultSetError("evaluation over zero episodes");

  std::vector<EpisodeResult> results(episodes.size());
  const std::int64_t n = static_cast<std::int64_t>(episodes.size());
#pragma omp parallel for schedule(dynamic, 4) if (config.parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Episode& ep = episodes[static_cast<std::size_t>(i)];
    EpisodeResult& res = results[static_cast<std::size_t>(i)];
    res.episode_id = ep.id;
    try {
      const SubTask subtask{ep.action, ep.landmark, landmark_kind_for(ep.action)};
      auto policy = make_policy(derive_seed(ep.seed, 1));
      Trajectory traj = execute_instruction(scene, ep.start, {subtask}, *policy,
                                            config.executor, {ep.goal});
      res.status = traj.status;
      res.error_message = traj.error_message;
      res.traveled = traj.traveled();
      const auto d = geodesic_distance(scene, ep.start.position, ep.goal.position);
      res.shortest = d ? *d : euclidean(ep.start.position, ep.goal.position);
      res.success = episode_success(scene, traj, ep.goal, config.executor.success_radius,
                                    config.lenient_success);
      if (res.success)
        res.spl_term = res.shortest == 0.0
                           ? 1.0
                           : res.shortest / std::max(res.traveled, res.shortest);
    } catch (const Error& e) {
      res.status = TrajectoryStatus::Error;
      res.error_message = e.what();
    }
  }

  EvalResult out;
  out.episodes = std::move(results);
  out.sr = success_rate(out.episodes);
  out.spl = spl(out.episodes);
  return out;
}

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
  throw SchemaError("unknown trajectory status: " + name);
}

}  // namespace

std::string report_to_json(const EvalResult& result) {
  nlohmann::json episodes = nlohmann::json::array();
  for (const auto& r : result.episodes)
    episodes.push_back({{"episode_id", r.episode_id},
                        {"success", r.success},
                        {"shortest", r.shortest},
                        {"traveled", r.traveled},
                        {"spl_term", r.spl_term},
                        {"status", status_name(r.status)},
                        {"error_message", r.error_message}});
  nlohmann::json doc = {
      {"aggregates",
       {{"sr", result.sr}, {"spl", result.spl}, {"count", result.episodes.size()}}},
      {"episodes", episodes}};
  return doc.dump(2) + "\n";
}

EvalResult report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("report is not valid JSON: ") + e.what());
  }
  EvalResult result;
  try {
    result.sr = doc.at("aggregates").at("sr").get<double>();
    result.spl = doc.at("aggregates").at("spl").get<double>();
    for (const auto& j : doc.at("episodes")) {
      EpisodeResult r;
      r.episode_id = j.at("episode_id").get<std::uint64_t>();
      r.success = j.at("success").get<bool>();
      r.shortest = j.at("shortest").get<double>();
      r.traveled = j.at("traveled").get<double>();
      r.spl_term = j.at("spl_term").get<double>();
      r.status = status_from_name(j.at("status").get<std::string>());
      r.error_message = j.at("error_message").get<std::string>();
      result.episodes.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
  return result;
}

}  // namespace a2nav
