// Acceptance gate: every release criterion below must print PASS.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "a2nav/episode.hpp"
#include "a2nav/errors.hpp"
#include "a2nav/eval.hpp"
#include "a2nav/fixtures.hpp"
#include "a2nav/llm.hpp"
#include "a2nav/navigator.hpp"
#include "a2nav/parser.hpp"
#include "a2nav/reward.hpp"
#include "a2nav/rng.hpp"
#include "a2nav/scene.hpp"
#include "json.hpp"

using namespace a2nav;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail
            << "\n";
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

// Fixture suite shared by the sampling and navigation criteria. Region-kind
// demands need regions (GoThrough needs a two-entrance region), so not every
// fixture hosts every kind.
struct FixtureSet {
  std::map<std::string, Scene> scenes;

  FixtureSet() {
    for (const char* name : {"corridor", "two-room", "four-room-ring", "exit-trap"})
      scenes.emplace(name, generate_fixture({name, 10.0, 2024}));
  }

  std::vector<const Scene*> eligible(ActionKind kind) const {
    std::vector<const Scene*> out;
    for (const auto& [name, scene] : scenes) {
      if (kind == ActionKind::GoThrough && name != "four-room-ring") continue;
      if ((kind == ActionKind::GoInto || kind == ActionKind::Exit) && name == "corridor")
        continue;
      out.push_back(&scene);
    }
    return out;
  }
};

// --- criterion 1: consistent-success-rate regression table ---------------

void criterion_1() {
  const auto t0 = Clock::now();
  struct Row {
    double a, b, want, tol;
  };
  const Row rows[] = {
      {35.0, 10.0, 28.6, 0.1}, {38.9, 15.0, 38.6, 0.1}, {19.3, 14.2, 73.6, 0.1},
      {7.1, 9.1, 78.0, 0.3},   {0.0, 6.0, 0.0, 0.1},    {0.0, 0.0, 100.0, 0.1},
      {42.0, 42.0, 100.0, 0.1}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& row : rows) {
    const double got = csr(row.a, row.b);
    if (std::fabs(got - row.want) > row.tol || csr(row.b, row.a) != got) {
      ok = false;
      detail << " (" << row.a << "," << row.b << ") -> " << got << " want " << row.want;
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) ok = false;
  report(1, ok,
         "CSR regression table, 7 rows within tolerance, symmetric, " + fmt1(elapsed * 1000) +
             " ms" + detail.str());
}

// --- criterion 2: sampled-episode invariants at scale ---------------------

void criterion_2() {
  const auto t0 = Clock::now();
  const FixtureSet fixtures;
  const std::uint64_t per_kind = 10000;
  bool ok = true;
  std::ostringstream detail;

  for (ActionKind kind : kAllActionKinds) {
    const auto hosts = fixtures.eligible(kind);
    std::uint64_t checked = 0, bad = 0;
    for (std::size_t h = 0; h < hosts.size(); ++h) {
      std::uint64_t quota = per_kind / hosts.size();
      if (h == 0) quota += per_kind % hosts.size();
      const auto episodes =
          generate_dataset(*hosts[h], kind, quota, 7000 + h, {}, true);
      for (const auto& ep : episodes) {
        ++checked;
        if (!check_episode(*hosts[h], ep).empty()) ++bad;
      }
    }
    if (checked != per_kind || bad != 0) {
      ok = false;
      detail << " " << to_string(kind) << ": " << bad << "/" << checked << " violations";
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) ok = false;
  report(2, ok,
         "10000 episodes per action kind satisfy every kind invariant, " + fmt1(elapsed) +
             " s" + detail.str());
}

// --- criterion 3: reward shaping telescopes; worked examples exact --------

void criterion_3() {
  bool ok = true;
  std::ostringstream detail;

  Rng rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.uniform_int(60));
    std::vector<double> dtg(static_cast<std::size_t>(len + 1));
    for (auto& d : dtg) d = rng.uniform_real(0.0, 10.0);
    double sum = 0.0;
    for (int t = 1; t <= len; ++t)
      sum += step_reward(dtg[static_cast<std::size_t>(t - 1)], 0.3,
                         dtg[static_cast<std::size_t>(t)], 0.3, false)
                 .neg_delta_dtg;
    if (std::fabs(sum - (dtg.front() - dtg.back())) > 1e-9) {
      ok = false;
      detail << " telescoping off by " << std::fabs(sum - (dtg.front() - dtg.back()));
      break;
    }
  }

  // Worked example: idling far away costs exactly the slack.
  const auto idle = step_reward(5.0, 0.7, 5.0, 0.7, false);
  if (idle.r_success != 0.0 || idle.r_angle_success != 0.0 || idle.neg_delta_dtg != 0.0 ||
      idle.neg_delta_atg != 0.0 || idle.r_slack != -0.01 ||
      std::fabs(idle.total + 0.01) > 1e-12) {
    ok = false;
    detail << " idle example wrong";
  }
  // Worked example: one clean forward step toward a distant goal.
  const auto approach = step_reward(5.0, 0.7, 4.75, 0.7, false);
  if (approach.neg_delta_dtg != 0.25 || approach.neg_delta_atg != 0.0 ||
      std::fabs(approach.total - 0.24) > 1e-12) {
    ok = false;
    detail << " approach example wrong";
  }
  // Worked example: stopping on the goal, aligned, earns both bonuses.
  const auto terminal = step_reward(0.25, 0.1, 0.0, 0.0, true);
  if (terminal.r_success != 5.0 || terminal.r_angle_success != 5.0 ||
      terminal.neg_delta_dtg != 0.25 || terminal.neg_delta_atg != 0.1 ||
      terminal.r_slack != -0.01 ||
      std::fabs(terminal.total - (5.0 + 5.0 + 0.25 + 0.1 - 0.01)) > 1e-12) {
    ok = false;
    detail << " terminal example wrong";
  }

  report(3, ok,
         "distance shaping telescopes to 1e-9 over 1000 random trajectories; three worked "
         "examples exact" +
             detail.str());
}

// --- criterion 4: shortest path vs independent relaxation oracle ----------

struct OracleField {
  std::vector<bool> reached;
  std::vector<GridCost> cost;
};

OracleField brute_force_field(const OccupancyGrid& grid, const GridPoint& source) {
  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
  OracleField field;
  field.reached.assign(n, false);
  field.cost.assign(n, GridCost{});
  if (!grid.is_free(source)) return field;
  field.reached[static_cast<std::size_t>(grid.index(source))] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < grid.height; ++r)
      for (int c = 0; c < grid.width; ++c) {
        const GridPoint u{c, r};
        const std::size_t iu = static_cast<std::size_t>(grid.index(u));
        if (!field.reached[iu]) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const GridPoint v{c + dc, r + dr};
            if (!grid.is_free(v)) continue;
            const bool diagonal = dr != 0 && dc != 0;
            if (diagonal && (!grid.is_free(GridPoint{c + dc, r}) ||
                             !grid.is_free(GridPoint{c, r + dr})))
              continue;
            GridCost cand = field.cost[iu];
            (diagonal ? cand.diag : cand.axis) += 1;
            const std::size_t iv = static_cast<std::size_t>(grid.index(v));
            if (!field.reached[iv] || cand.cells() < field.cost[iv].cells()) {
              field.reached[iv] = true;
              field.cost[iv] = cand;
              changed = true;
            }
          }
      }
  }
  return field;
}

void criterion_4() {
  const auto t0 = Clock::now();
  Rng rng(4444);
  bool ok = true;
  int grids = 0;
  std::ostringstream detail;
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 3 + static_cast<int>(rng.uniform_int(18));
    const int h = 3 + static_cast<int>(rng.uniform_int(18));
    OccupancyGrid grid;
    grid.resolution = 0.25;
    grid.width = w;
    grid.height = h;
    grid.cells.resize(static_cast<std::size_t>(w) * h);
    for (auto& cell : grid.cells) cell = rng.uniform() < 0.35 ? 1 : 0;
    std::vector<GridPoint> free;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        if (grid.is_free(GridPoint{c, r})) free.push_back(GridPoint{c, r});
    if (free.empty()) continue;
    ++grids;
    const GridPoint source = free[static_cast<std::size_t>(rng.uniform_int(free.size()))];

    const DistanceField fast = compute_distance_field(grid, {source});
    const OracleField slow = brute_force_field(grid, source);
    for (std::size_t i = 0; i < grid.cells.size() && ok; ++i) {
      if (fast.reached[i] != slow.reached[i] ||
          (fast.reached[i] && fast.cost[i].cells() != slow.cost[i].cells())) {
        ok = false;
        detail << " mismatch on grid " << trial << " cell " << i;
      }
    }
    if (!ok) break;
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) ok = false;
  report(4, ok,
         "Dijkstra equals the brute-force relaxation oracle exactly on " +
             std::to_string(grids) + " random grids, " + fmt1(elapsed) + " s" + detail.str());
}

// --- criterion 5: oracle navigator success rate per kind ------------------

EvalResult eval_kind(const FixtureSet& fixtures, ActionKind kind, int total,
                     const PolicyFactory& factory, std::uint64_t seed) {
  const auto hosts = fixtures.eligible(kind);
  EvalConfig config;
  config.executor = ExecutorConfig{100, 500, 1.0};
  config.parallel = true;

  EvalResult pooled;
  for (std::size_t h = 0; h < hosts.size(); ++h) {
    int quota = total / static_cast<int>(hosts.size());
    if (h == 0) quota += total % static_cast<int>(hosts.size());
    const auto episodes = generate_dataset(*hosts[h], kind,
                                           static_cast<std::uint64_t>(quota), seed + h, {},
                                           true);
    const EvalResult part = evaluate(*hosts[h], episodes, factory, config);
    pooled.episodes.insert(pooled.episodes.end(), part.episodes.begin(),
                           part.episodes.end());
  }
  pooled.sr = success_rate(pooled.episodes);
  pooled.spl = spl(pooled.episodes);
  return pooled;
}

void criterion_5() {
  const auto t0 = Clock::now();
  const FixtureSet fixtures;
  const PolicyFactory oracle = [](std::uint64_t) { return make_oracle_policy(); };
  bool ok = true;
  std::ostringstream detail;
  for (ActionKind kind : kAllActionKinds) {
    const EvalResult result = eval_kind(fixtures, kind, 200, oracle, 500);
    detail << " " << to_string(kind) << "=" << fmt1(result.sr) << "%";
    if (result.sr < 95.0 || result.episodes.size() != 200) ok = false;
  }
  report(5, ok,
         "oracle success rate over 200 episodes per kind (radius 1.0 m, m_s=100):" +
             detail.str() + ", " + fmt1(seconds_since(t0)) + " s");
}

// --- criterion 6: the exit trap separates action-aware from landmark-only -

void criterion_6() {
  const auto t0 = Clock::now();
  const Scene trap = generate_fixture({"exit-trap", 10.0, 2024});
  const auto episodes = generate_dataset(trap, ActionKind::Exit, 200, 600, {}, true);
  EvalConfig config;
  config.executor = ExecutorConfig{100, 500, 1.0};
  config.parallel = true;

  const EvalResult oracle = evaluate(
      trap, episodes, [](std::uint64_t) { return make_oracle_policy(); }, config);
  const EvalResult baseline = evaluate(
      trap, episodes, [](std::uint64_t) { return make_goto_only_policy(); }, config);

  const double elapsed = seconds_since(t0);
  const bool ok = oracle.sr - baseline.sr >= 20.0 && elapsed < 120.0;
  report(6, ok,
         "exit-trap gap on 200 Exit episodes: oracle " + fmt1(oracle.sr) +
             "% vs landmark-only " + fmt1(baseline.sr) + "% (need >= 20 pp), " +
             fmt1(elapsed) + " s");
}

// --- criterion 7: executor budget accounting -------------------------------

class NeverStopPolicy : public Policy {
 public:
  void begin_subtask(const Scene&, const Pose&, const SubTask&,
                     const std::optional<Pose>&) override {}
  AgentAction step(const Observation&) override { return AgentAction::TurnLeft; }
};

void criterion_7() {
  const Scene scene = generate_fixture({"corridor", 10.0, 1});
  const Pose start{scene.grid.cell_center(scene.free_cells.front()), 0.0};
  bool ok = true;
  std::ostringstream detail;

  NeverStopPolicy policy;
  const std::vector<SubTask> three(3, SubTask{ActionKind::GoTo, "x", LandmarkKind::Object});
  const auto small = execute_instruction(scene, start, three, policy,
                                         ExecutorConfig{9, 100, 3.0});
  if (small.steps.size() != 27 || small.status != TrajectoryStatus::AllSubtasksDone) {
    ok = false;
    detail << " m_s accounting: " << small.steps.size() << " steps";
  }
  for (std::size_t i = 0; i < small.steps.size(); ++i)
    if (small.steps[i].subtask_index != static_cast<int>(i / 9)) ok = false;

  const std::vector<SubTask> six(6, SubTask{ActionKind::GoTo, "x", LandmarkKind::Object});
  const auto capped = execute_instruction(scene, start, six, policy,
                                          ExecutorConfig{100, 500, 3.0});
  if (capped.steps.size() != 500 ||
      capped.status != TrajectoryStatus::EpisodeBudgetExhausted) {
    ok = false;
    detail << " m_e accounting: " << capped.steps.size() << " steps, wrong status";
  }

  report(7, ok,
         "never-stopping policy consumes exactly m_s steps per sub-task; six sub-tasks at "
         "m_s=100, m_e=500 stop at exactly 500 steps with EpisodeBudgetExhausted" +
             detail.str());
}

// --- criterion 8: parser quality -------------------------------------------

struct CorpusEntry {
  std::string instruction;
  std::vector<SubTask> expected;
};

std::vector<CorpusEntry> load_corpus() {
  const std::string path = std::string(A2NAV_DATA_DIR) + "/golden_corpus.jsonl";
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open corpus: " + path);
  std::vector<CorpusEntry> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    CorpusEntry entry;
    entry.instruction = j.at("instruction").get<std::string>();
    for (const auto& e : j.at("expected")) {
      SubTask st;
      st.action = action_kind_from_string(e.at("action").get<std::string>());
      st.landmark = e.at("landmark").get<std::string>();
      st.landmark_kind = landmark_kind_for(st.action);
      entry.expected.push_back(std::move(st));
    }
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

bool sequences_match(const std::vector<SubTask>& got, const std::vector<SubTask>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i].action != want[i].action || got[i].landmark != want[i].landmark) return false;
  return true;
}

void criterion_8() {
  const auto corpus = load_corpus();
  const ActionLexicon lexicon = ActionLexicon::builtin();
  const TrigramEncoder encoder;
  bool ok = corpus.size() == 20;
  std::ostringstream detail;

  int heuristic_hits = 0;
  for (const auto& entry : corpus) {
    const auto parsed = parse_instruction(entry.instruction, ParserKind::Heuristic,
                                          std::nullopt, nullptr, encoder, lexicon);
    if (sequences_match(parsed.subtasks, entry.expected)) ++heuristic_hits;
  }
  if (heuristic_hits < 16) ok = false;

  int lexicon_hits = 0;
  for (const auto& [phrase, kind] : lexicon.entries())
    if (canonicalize_action(phrase, encoder, lexicon) == kind) ++lexicon_hits;
  if (lexicon_hits != static_cast<int>(lexicon.entries().size())) ok = false;

  // The LLM lane, replayed from canned completions keyed by prompt hash.
  FixtureStore store;
  for (const auto& entry : corpus) {
    std::string completion;
    for (std::size_t i = 0; i < entry.expected.size(); ++i)
      completion += std::to_string(i + 1) + ". (" +
                    canonical_phrase(entry.expected[i].action) + ", " +
                    entry.expected[i].landmark + ")\n";
    store.put(build_prompt(entry.instruction, PromptStyle::Examples), completion);
  }
  LlmClient client(std::move(store));
  int llm_hits = 0;
  for (const auto& entry : corpus) {
    const auto parsed = parse_instruction(entry.instruction, ParserKind::Llm,
                                          PromptStyle::Examples, &client, encoder, lexicon);
    if (sequences_match(parsed.subtasks, entry.expected)) ++llm_hits;
  }
  if (llm_hits != static_cast<int>(corpus.size())) ok = false;

  report(8, ok,
         "parser quality: heuristic " + std::to_string(heuristic_hits) + "/20 exact (need "
         ">= 16), lexicon canonicalization " +
             std::to_string(lexicon_hits) + "/" + std::to_string(lexicon.entries().size()) +
             ", fixture-backed LLM lane " + std::to_string(llm_hits) + "/20");
}

// --- criterion 9: CLI artifacts are byte-identical across reruns -----------

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_9() {
  const std::string cli = A2NAV_CLI_PATH;
  bool ok = true;
  std::ostringstream detail;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      ok = false;
      detail << " command failed (" << rc << "): " << args;
    }
  };

  const std::string ds_a = "acc9_dataset_a.jsonl", ds_b = "acc9_dataset_b.jsonl";
  run("--seed 42 dataset generate --scene four-room-ring --action gointo --count 50 --out " +
      ds_a);
  run("--seed 42 dataset generate --scene four-room-ring --action gointo --count 50 --out " +
      ds_b);
  const auto text_a = slurp(ds_a), text_b = slurp(ds_b);
  if (!text_a || !text_b || *text_a != *text_b || text_a->empty()) {
    ok = false;
    detail << " dataset outputs differ";
  }

  const std::string rep_a = "acc9_report_a.json", rep_b = "acc9_report_b.json";
  run("--seed 42 eval --scene four-room-ring --dataset " + ds_a +
      " --policy oracle --report " + rep_a);
  run("--seed 42 eval --scene four-room-ring --dataset " + ds_a +
      " --policy oracle --report " + rep_b);
  const auto report_a = slurp(rep_a), report_b = slurp(rep_b);
  if (!report_a || !report_b || *report_a != *report_b || report_a->empty()) {
    ok = false;
    detail << " eval reports differ";
  }

  for (const auto& f : {ds_a, ds_b, rep_a, rep_b}) std::remove(f.c_str());
  report(9, ok,
         "dataset generate and eval are byte-identical across two runs with the same seed" +
             detail.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures == 0)
    std::cout << "all 9 acceptance criteria passed\n";
  else
    std::cout << failures << " acceptance criteria FAILED\n";
  return failures;
}
