#pragma once

#include <functional>
#include <string>
#include <vector>

#include "a2nav/episode.hpp"
#include "a2nav/navigator.hpp"

namespace a2nav {

struct EpisodeResult {
  std::uint64_t episode_id = 0;
  bool success = false;
  double shortest = 0.0;  // geodesic start->goal, meters
  double traveled = 0.0;  // summed positional displacement, meters
  double spl_term = 0.0;
  TrajectoryStatus status = TrajectoryStatus::AllSubtasksDone;
  std::string error_message;
};

struct EvalResult {
  std::vector<EpisodeResult> episodes;
  double sr = 0.0;   // percent
  double spl = 0.0;  // percent
};

struct EvalConfig {
  ExecutorConfig executor;
  bool lenient_success = false;  // success without an explicit STOP
  bool parallel = true;
};

// True iff the agent stopped (or finished all sub-tasks) within `radius`
// geodesic meters of the goal. The lenient rule drops the stop requirement.
bool episode_success(const Scene& scene, const Trajectory& trajectory, const Pose& goal,
                     double radius, bool lenient = false);

// Success weighted by inverse path length, as a percent.
double spl(const std::vector<EpisodeResult>& results);
double success_rate(const std::vector<EpisodeResult>& results);

// Consistency on SR between two datasets, as a percent. Two zero rates
// compare as identical performance (100%).
double csr(double sr_a, double sr_b);

// Fills dtg/atg-derived reward components for every step of a trajectory
// executed against a known goal pose.
void annotate_rewards(const Scene& scene, Trajectory& trajectory, const Pose& goal,
                      const RewardConfig& config = {});

using PolicyFactory = std::function<std::unique_ptr<Policy>(std::uint64_t seed)>;

// Runs every episode through the executor and aggregates SR/SPL.
// Per-episode errors are recorded, never abort the batch.
EvalResult evaluate(const Scene& scene, const std::vector<Episode>& episodes,
                    const PolicyFactory& make_policy, const EvalConfig& config = {});

// Report file payload (deterministic; no timestamps).
std::string report_to_json(const EvalResult& result);
EvalResult report_from_json(const std::string& text);

}  // namespace a2nav
