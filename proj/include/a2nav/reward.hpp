#pragma once

#include "a2nav/types.hpp"

namespace a2nav {

struct RewardConfig {
  double success_bonus = 5.0;
  double angle_success_bonus = 5.0;
  double success_radius = 1.0;                       // meters
  double angle_success_threshold = deg_to_rad(25.0);
  double atg_gate_radius = 1.0;                      // meters
  double slack = -0.01;
};

struct RewardComponents {
  double r_success = 0.0;
  double r_angle_success = 0.0;
  double neg_delta_dtg = 0.0;
  double neg_delta_atg = 0.0;
  double r_slack = 0.0;
  double total = 0.0;
};

// Per-step shaped reward. dtg is geodesic distance-to-goal, atg the absolute
// wrapped heading difference to the goal heading. The angle term is gated to
// zero outside the 1 m circle; the success bonus additionally requires STOP.
RewardComponents step_reward(double dtg_prev, double atg_prev, double dtg_cur,
                             double atg_cur, bool stopped,
                             const RewardConfig& config = {});

}  // namespace a2nav
