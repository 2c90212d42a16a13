#pragma once

#include <string>
#include <vector>

#include "a2nav/scene.hpp"

namespace a2nav {

// Procedural fixture scenes used by tests, the acceptance suite, and the
// `fixture generate` command.
struct FixtureSpec {
  std::string name;      // corridor | two-room | four-room-ring | exit-trap
  double size_m = 10.0;  // scene extent along its major axis
  std::uint64_t seed = 0;
};

Scene generate_fixture(const FixtureSpec& spec);

std::vector<std::string> fixture_names();
bool is_fixture_name(const std::string& name);

}  // namespace a2nav
