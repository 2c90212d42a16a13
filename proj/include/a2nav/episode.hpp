#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "a2nav/rng.hpp"
#include "a2nav/scene.hpp"
#include "a2nav/types.hpp"

namespace a2nav {

struct Episode {
  std::uint64_t id = 0;
  std::string scene_id;
  ActionKind action = ActionKind::GoTo;
  std::string landmark;
  Pose start;
  std::vector<WorldPoint> path;  // ground-truth poly-line, path[0] = start
  Pose goal;
  std::uint64_t seed = 0;
};

struct SamplerConfig {
  int max_attempts = 1000;          // rejection-sampling budget per episode
  double min_displacement = 1.5;    // GoPast endpoint separation, meters
  double entrance_radius = 1.5;     // "near entrance" geodesic bound, meters
  double heading_jitter = deg_to_rad(45.0);  // GoPast goal-heading jitter
};

Episode sample_episode(const Scene& scene, ActionKind kind, Rng& rng,
                       const SamplerConfig& config = {});

// Exactly `count` episodes, bit-for-bit reproducible from (scene, kind, seed).
std::vector<Episode> generate_dataset(const Scene& scene, ActionKind kind,
                                      std::uint64_t count, std::uint64_t seed,
                                      const SamplerConfig& config = {},
                                      bool parallel = true);

// Checks the kind-specific invariants; returns an empty string when the
// episode passes, else a description of the first violation.
std::string check_episode(const Scene& scene, const Episode& episode,
                          const SamplerConfig& config = {});

// Dataset file: one header line then one episode per line.
std::string dataset_to_text(const std::string& scene_id, ActionKind kind,
                            std::uint64_t seed, const std::vector<Episode>& episodes);
std::vector<Episode> dataset_from_text(const std::string& text);

// Arc-length position along a poly-line; index of the vertex closest to
// the requested fraction (first on ties).
std::size_t vertex_at_fraction(const std::vector<WorldPoint>& path, double fraction);

}  // namespace a2nav
