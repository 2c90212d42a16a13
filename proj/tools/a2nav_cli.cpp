// Command-line harness: fixtures, datasets, parsing, execution, evaluation,
// and trajectory plots.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "a2nav/episode.hpp"
#include "a2nav/errors.hpp"
#include "a2nav/eval.hpp"
#include "a2nav/fixtures.hpp"
#include "a2nav/llm.hpp"
#include "a2nav/navigator.hpp"
#include "a2nav/parser.hpp"
#include "a2nav/plot.hpp"
#include "a2nav/scene.hpp"
#include "json.hpp"

namespace {

using namespace a2nav;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  ExecutorConfig executor;
  SamplerConfig sampler;
  bool parallel = true;
};

void apply_config_file(GlobalOptions& opts) {
  if (opts.config_path.empty()) return;
  std::ifstream in(opts.config_path);
  if (!in) throw SchemaError("cannot open config file: " + opts.config_path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "max_subtask_steps")
      opts.executor.max_subtask_steps = std::stoi(value);
    else if (key == "max_episode_steps")
      opts.executor.max_episode_steps = std::stoi(value);
    else if (key == "success_radius")
      opts.executor.success_radius = std::stod(value);
    else if (key == "max_attempts")
      opts.sampler.max_attempts = std::stoi(value);
    else if (key == "min_displacement")
      opts.sampler.min_displacement = std::stod(value);
    else if (key == "entrance_radius")
      opts.sampler.entrance_radius = std::stod(value);
    else if (key == "heading_jitter_deg")
      opts.sampler.heading_jitter = deg_to_rad(std::stod(value));
    else if (key == "parallel")
      opts.parallel = value == "1" || value == "true";
    else
      throw SchemaError("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
}

Scene resolve_scene(const std::string& name_or_path, std::uint64_t seed) {
  if (is_fixture_name(name_or_path)) {
    FixtureSpec spec;
    spec.name = name_or_path;
    spec.seed = seed;
    return generate_fixture(spec);
  }
  return load_scene_file(name_or_path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open output file: " + path);
  out << text;
}

Pose default_start(const Scene& scene) {
  if (scene.free_cells.empty()) throw InvariantError("scene has no free cell");
  return Pose{scene.grid.cell_center(scene.free_cells.front()), 0.0};
}

ParserKind parser_kind(const std::string& name) {
  if (name == "heuristic") return ParserKind::Heuristic;
  if (name == "llm") return ParserKind::Llm;
  throw SchemaError("unknown parser: " + name);
}

PromptStyle prompt_style(const std::string& name) {
  if (name == "definition") return PromptStyle::Definition;
  if (name == "examples") return PromptStyle::Examples;
  if (name == "both") return PromptStyle::Both;
  throw SchemaError("unknown prompt style: " + name);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_scene_validate(const std::string& path) {
  const Scene scene = load_scene_file(path);
  std::size_t entrances = 0;
  for (const auto& r : scene.regions) entrances += r.entrances.size();
  std::cout << "scene " << scene.id << ": " << scene.grid.width << "x"
            << scene.grid.height << " cells @ " << scene.grid.resolution << " m, "
            << scene.free_cells.size() << " free, " << scene.regions.size()
            << " regions (" << entrances << " entrances), " << scene.objects.size()
            << " objects\nvalid\n";
  return 0;
}

int cmd_fixture_generate(const GlobalOptions& opts, const std::string& name, double size,
                         const std::string& out) {
  FixtureSpec spec;
  spec.name = name;
  spec.size_m = size;
  spec.seed = opts.seed;
  const Scene scene = generate_fixture(spec);
  write_output(out, scene_to_json(scene));
  return 0;
}

int cmd_dataset_generate(const GlobalOptions& opts, const std::string& scene_arg,
                         const std::string& action, std::uint64_t count,
                         const std::string& out) {
  const Scene scene = resolve_scene(scene_arg, opts.seed);
  const ActionKind kind = action_kind_from_string(action);
  const auto episodes =
      generate_dataset(scene, kind, count, opts.seed, opts.sampler, opts.parallel);
  std::size_t failures = 0;
  for (const auto& ep : episodes) {
    const std::string violation = check_episode(scene, ep, opts.sampler);
    if (!violation.empty()) {
      ++failures;
      std::cerr << "episode " << ep.id << ": " << violation << "\n";
    }
  }
  write_output(out, dataset_to_text(scene.id, kind, opts.seed, episodes));
  std::cerr << "kind=" << to_string(kind) << " count=" << episodes.size()
            << " invariant_failures=" << failures << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_parse(const GlobalOptions& opts, const std::string& instruction,
              const std::string& corpus_path, const std::string& parser_name,
              const std::string& style_name, const std::string& fixtures_path,
              const std::string& lexicon_path, const std::string& out) {
  (void)opts;
  const ParserKind parser = parser_kind(parser_name);
  const TrigramEncoder encoder;
  const ActionLexicon lexicon = lexicon_path.empty()
                                    ? ActionLexicon::builtin()
                                    : ActionLexicon::from_table(read_file(lexicon_path));
  std::unique_ptr<LlmClient> llm;
  if (parser == ParserKind::Llm) {
    if (!fixtures_path.empty())
      llm = std::make_unique<LlmClient>(FixtureStore::from_file(fixtures_path));
    else
      llm = std::make_unique<LlmClient>(LlmConfig::from_env(), make_http_transport());
  }
  const std::optional<PromptStyle> style =
      style_name.empty() ? std::nullopt
                         : std::optional<PromptStyle>(prompt_style(style_name));

  if (!corpus_path.empty()) {
    // Batch mode over a golden corpus: line-delimited
    // {"instruction", "expected": [{"action", "landmark"}, ...]}.
    std::istringstream in(read_file(corpus_path));
    std::string line;
    std::size_t total = 0, matched = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto parsed = parse_instruction(j.at("instruction").get<std::string>(),
                                            parser, style, llm.get(), encoder, lexicon);
      bool ok = parsed.subtasks.size() == j.at("expected").size();
      for (std::size_t i = 0; ok && i < parsed.subtasks.size(); ++i) {
        const auto& e = j.at("expected").at(i);
        ok = to_string(parsed.subtasks[i].action) == e.at("action").get<std::string>() &&
             parsed.subtasks[i].landmark == e.at("landmark").get<std::string>();
      }
      ++total;
      matched += ok ? 1 : 0;
    }
    if (total == 0) throw SchemaError("corpus is empty: " + corpus_path);
    std::cout << "exact_match_rate=" << pct(100.0 * matched / total) << "% (" << matched
              << "/" << total << ")\n";
    return 0;
  }

  const auto parsed =
      parse_instruction(instruction, parser, style, llm.get(), encoder, lexicon);
  write_output(out, format_subtasks(parsed.subtasks));
  return 0;
}

int cmd_run(const GlobalOptions& opts, const std::string& scene_arg,
            const std::string& dataset_path, const std::string& instruction,
            const std::string& policy_name, const std::string& parser_name,
            const std::string& out) {
  if (dataset_path.empty() == instruction.empty())
    throw SchemaError("run: supply exactly one of --dataset or --instruction");
  const Scene scene = resolve_scene(scene_arg, opts.seed);

  std::ostringstream traces;
  if (!dataset_path.empty()) {
    const auto episodes = dataset_from_text(read_file(dataset_path));
    for (const auto& ep : episodes) {
      const SubTask subtask{ep.action, ep.landmark, landmark_kind_for(ep.action)};
      auto policy = make_policy(policy_name, derive_seed(ep.seed, 1));
      Trajectory traj = execute_instruction(scene, ep.start, {subtask}, *policy,
                                            opts.executor, {ep.goal});
      traj.id = std::to_string(ep.id);
      annotate_rewards(scene, traj, ep.goal);
      traces << trajectory_to_text(traj);
    }
  } else {
    const TrigramEncoder encoder;
    const ActionLexicon lexicon = ActionLexicon::builtin();
    const auto parsed = parse_instruction(instruction, parser_kind(parser_name),
                                          std::nullopt, nullptr, encoder, lexicon);
    auto policy = make_policy(policy_name, opts.seed);
    Trajectory traj =
        execute_instruction(scene, default_start(scene), parsed.subtasks, *policy,
                            opts.executor);
    traj.id = "instruction";
    traces << trajectory_to_text(traj);
  }
  write_output(out, traces.str());
  return 0;
}

int cmd_eval(const GlobalOptions& opts, const std::string& scene_arg,
             const std::string& dataset_path, const std::string& policy_name,
             const std::string& report_path, const std::string& report_a,
             const std::string& report_b) {
  if (!report_a.empty() || !report_b.empty()) {
    if (report_a.empty() || report_b.empty())
      throw SchemaError("eval: --report-a and --report-b go together");
    const EvalResult a = report_from_json(read_file(report_a));
    const EvalResult b = report_from_json(read_file(report_b));
    std::cout << "csr=" << pct(csr(a.sr, b.sr)) << "%\n";
    return 0;
  }
  if (scene_arg.empty() || dataset_path.empty())
    throw SchemaError("eval: --scene and --dataset are required");
  const Scene scene = resolve_scene(scene_arg, opts.seed);
  const auto episodes = dataset_from_text(read_file(dataset_path));
  EvalConfig config;
  config.executor = opts.executor;
  config.parallel = opts.parallel;
  const EvalResult result = evaluate(
      scene, episodes,
      [&](std::uint64_t seed) { return make_policy(policy_name, seed); }, config);
  std::size_t errors = 0;
  for (const auto& r : result.episodes)
    if (r.status == TrajectoryStatus::Error) ++errors;
  std::cout << "sr=" << pct(result.sr) << "% spl=" << pct(result.spl)
            << "% count=" << result.episodes.size() << " errors=" << errors << "\n";
  if (!report_path.empty()) write_output(report_path, report_to_json(result));
  return 0;
}

int cmd_plot(const GlobalOptions& opts, const std::string& scene_arg,
             const std::string& trace_path, const std::string& out) {
  const Scene scene = resolve_scene(scene_arg, opts.seed);
  if (trace_path.empty()) {
    write_output(out, render_scene_svg(scene));
    return 0;
  }
  const Trajectory traj = trajectory_from_text(read_file(trace_path));
  write_output(out, render_trajectory_svg(scene, traj));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale zero-shot navigation harness"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --seed/--config after the subcommand too

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "global random seed");
  app.add_option("--config", opts.config_path, "key=value config file");

  auto* scene_cmd = app.add_subcommand("scene", "scene document utilities");
  scene_cmd->require_subcommand(1);
  std::string scene_path;
  auto* validate_cmd = scene_cmd->add_subcommand("validate", "validate a scene file");
  validate_cmd->add_option("path", scene_path, "scene JSON file")->required();

  auto* fixture_cmd = app.add_subcommand("fixture", "procedural fixture scenes");
  fixture_cmd->require_subcommand(1);
  std::string fixture_name, fixture_out;
  double fixture_size = 10.0;
  auto* fgen = fixture_cmd->add_subcommand("generate", "generate a fixture scene");
  fgen->add_option("--name", fixture_name, "corridor|two-room|four-room-ring|exit-trap")
      ->required();
  fgen->add_option("--size", fixture_size, "extent in meters");
  fgen->add_option("--out", fixture_out, "output scene file (default stdout)");

  auto* dataset_cmd = app.add_subcommand("dataset", "episode datasets");
  dataset_cmd->require_subcommand(1);
  std::string ds_scene, ds_action, ds_out;
  std::uint64_t ds_count = 0;
  auto* dgen = dataset_cmd->add_subcommand("generate", "sample an episode dataset");
  dgen->add_option("--scene", ds_scene, "fixture name or scene file")->required();
  dgen->add_option("--action", ds_action, "goto|gopast|gointo|gothrough|exit")
      ->required();
  dgen->add_option("--count", ds_count, "number of episodes")->required();
  dgen->add_option("--out", ds_out, "output dataset file (default stdout)");

  auto* parse_cmd = app.add_subcommand("parse", "instruction decomposition");
  std::string p_instruction, p_corpus, p_parser = "heuristic", p_style, p_fixtures,
              p_lexicon, p_out;
  parse_cmd->add_option("--instruction", p_instruction, "instruction text");
  parse_cmd->add_option("--corpus", p_corpus, "golden corpus file (batch mode)");
  parse_cmd->add_option("--parser", p_parser, "heuristic|llm");
  parse_cmd->add_option("--prompt-style", p_style, "definition|examples|both");
  parse_cmd->add_option("--llm-fixtures", p_fixtures, "offline completion fixtures");
  parse_cmd->add_option("--lexicon", p_lexicon, "phrase<TAB>kind override table");
  parse_cmd->add_option("--out", p_out, "output file (default stdout)");

  auto* run_cmd = app.add_subcommand("run", "execute episodes or an instruction");
  std::string r_scene, r_dataset, r_instruction, r_policy = "oracle",
              r_parser = "heuristic", r_out;
  run_cmd->add_option("--scene", r_scene, "fixture name or scene file")->required();
  run_cmd->add_option("--dataset", r_dataset, "dataset file");
  run_cmd->add_option("--instruction", r_instruction, "instruction text");
  run_cmd->add_option("--policy", r_policy,
                      "oracle|goto-only|random|greedy|greedy-backtrack");
  run_cmd->add_option("--parser", r_parser, "heuristic|llm");
  run_cmd->add_option("--out", r_out, "trace output file (default stdout)");

  auto* eval_cmd = app.add_subcommand("eval", "batch evaluation / CSR");
  std::string e_scene, e_dataset, e_policy = "oracle", e_report, e_report_a, e_report_b;
  eval_cmd->add_option("--scene", e_scene, "fixture name or scene file");
  eval_cmd->add_option("--dataset", e_dataset, "dataset file");
  eval_cmd->add_option("--policy", e_policy,
                       "oracle|goto-only|random|greedy|greedy-backtrack");
  eval_cmd->add_option("--report", e_report, "report JSON output file");
  eval_cmd->add_option("--report-a", e_report_a, "existing report (CSR mode)");
  eval_cmd->add_option("--report-b", e_report_b, "existing report (CSR mode)");

  auto* plot_cmd = app.add_subcommand("plot", "top-down SVG rendering");
  std::string pl_scene, pl_trace, pl_out;
  plot_cmd->add_option("--scene", pl_scene, "fixture name or scene file")->required();
  plot_cmd->add_option("--trace", pl_trace, "trace file (scene-only when omitted)");
  plot_cmd->add_option("--out", pl_out, "SVG output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_config_file(opts);
    if (validate_cmd->parsed()) return cmd_scene_validate(scene_path);
    if (fgen->parsed()) return cmd_fixture_generate(opts, fixture_name, fixture_size,
                                                    fixture_out);
    if (dgen->parsed())
      return cmd_dataset_generate(opts, ds_scene, ds_action, ds_count, ds_out);
    if (parse_cmd->parsed())
      return cmd_parse(opts, p_instruction, p_corpus, p_parser, p_style, p_fixtures,
                       p_lexicon, p_out);
    if (run_cmd->parsed())
      return cmd_run(opts, r_scene, r_dataset, r_instruction, r_policy, r_parser, r_out);
    if (eval_cmd->parsed())
      return cmd_eval(opts, e_scene, e_dataset, e_policy, e_report, e_report_a,
                      e_report_b);
    if (plot_cmd->parsed()) return cmd_plot(opts, pl_scene, pl_trace, pl_out);
  } catch (const RetriesExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LlmUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const FixtureMissError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const AuthError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
