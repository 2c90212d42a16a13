#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace a2nav {

inline constexpr double kPi = 3.14159265358979323846;

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

struct GridPoint {
  int col = 0;
  int row = 0;
};

inline bool operator==(const GridPoint& a, const GridPoint& b) {
  return a.col == b.col && a.row == b.row;
}

inline double euclidean(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Normalizes to [0, 2*pi).
inline double normalize_heading(double h) {
  h = std::fmod(h, 2.0 * kPi);
  if (h < 0.0) h += 2.0 * kPi;
  if (h >= 2.0 * kPi) h = 0.0;
  return h;
}

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Absolute angular distance in [0, pi].
inline double angular_distance(double a, double b) {
  return std::fabs(wrap_angle(a - b));
}

inline constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }

struct Pose {
  WorldPoint position;
  double heading = 0.0;  // radians in [0, 2*pi)
};

enum class ActionKind { GoTo, GoPast, GoInto, GoThrough, Exit };

inline constexpr ActionKind kAllActionKinds[] = {
    ActionKind::GoTo, ActionKind::GoPast, ActionKind::GoInto,
    ActionKind::GoThrough, ActionKind::Exit};

std::string to_string(ActionKind kind);
ActionKind action_kind_from_string(const std::string& name);

// The phrase used both for display and as the anchor of semantic translation.
std::string canonical_phrase(ActionKind kind);

enum class LandmarkKind { Object, Region };

inline LandmarkKind landmark_kind_for(ActionKind kind) {
  switch (kind) {
    case ActionKind::GoInto:
    case ActionKind::GoThrough:
    case ActionKind::Exit:
      return LandmarkKind::Region;
    default:
      return LandmarkKind::Object;
  }
}

struct SubTask {
  ActionKind action = ActionKind::GoTo;
  std::string landmark;
  LandmarkKind landmark_kind = LandmarkKind::Object;
};

}  // namespace a2nav
