// Compares the OpenMP-parallel dataset/eval kernels against the serial
// reference path and verifies both produce identical artifacts.

#include <chrono>
#include <cstdio>
#include <string>

#include "a2nav/episode.hpp"
#include "a2nav/eval.hpp"
#include "a2nav/fixtures.hpp"
#include "a2nav/navigator.hpp"

using namespace a2nav;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_s(F&& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s serial %7.3f s   parallel %7.3f s   speedup %5.2fx   %s\n", name,
              serial, parallel, serial / parallel,
              identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main() {
  const Scene scene = generate_fixture({"four-room-ring", 12.0, 2024});
  const std::uint64_t n = 2000;

  std::vector<Episode> serial_ds, parallel_ds;
  const double ds_serial =
      time_s([&] { serial_ds = generate_dataset(scene, ActionKind::GoInto, n, 42, {}, false); });
  const double ds_parallel =
      time_s([&] { parallel_ds = generate_dataset(scene, ActionKind::GoInto, n, 42, {}, true); });
  row("dataset generate", ds_serial, ds_parallel,
      dataset_to_text(scene.id, ActionKind::GoInto, 42, serial_ds) ==
          dataset_to_text(scene.id, ActionKind::GoInto, 42, parallel_ds));

  const auto episodes = generate_dataset(scene, ActionKind::GoInto, 400, 7, {}, true);
  const PolicyFactory oracle = [](std::uint64_t) { return make_oracle_policy(); };
  EvalConfig config;
  config.executor = ExecutorConfig{100, 500, 1.0};

  EvalResult serial_ev, parallel_ev;
  config.parallel = false;
  const double ev_serial = time_s([&] { serial_ev = evaluate(scene, episodes, oracle, config); });
  config.parallel = true;
  const double ev_parallel =
      time_s([&] { parallel_ev = evaluate(scene, episodes, oracle, config); });
  row("eval", ev_serial, ev_parallel,
      report_to_json(serial_ev) == report_to_json(parallel_ev));
  return 0;
}
