#include "a2nav/reward.hpp"

namespace a2nav {

RewardComponents step_reward(double dtg_prev, double atg_prev, double dtg_cur,
                             double atg_cur, bool stopped, const RewardConfig& config) {
  RewardComponents r;
  if (stopped && dtg_cur <= config.success_radius) r.r_success = config.success_bonus;
  if (dtg_cur <= config.success_radius && atg_cur <= config.angle_success_threshold)
    r.r_angle_success = config.angle_success_bonus;
  r.neg_delta_dtg = -(dtg_cur - dtg_prev);
  // Heading shaping only matters once the agent is inside the goal circle.
  r.neg_delta_atg = dtg_cur > config.atg_gate_radius ? 0.0 : -(atg_cur - atg_prev);
  r.r_slack = config.slack;
  r.total = r.r_success + r.r_angle_success + r.neg_delta_dtg + r.neg_delta_atg + r.r_slack;
  return r;
}

}  // namespace a2nav
