#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plot.hpp"
#include "windward/oracle.hpp"
#include "windward/player.hpp"
#include "windward/scenario.hpp"
#include "windward/solver.hpp"

namespace fs = std::filesystem;
using namespace windward;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit-code contract: 0 ok, 1 validation, 2 unsolvable, 3 play failure,
// 4 timeout, 5 invariant violation.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kUnsolvable = 2,
  kPlayFailure = 3,
  kTimeout = 4,
  kInvariantViolation = 5,
};

int outcome_exit(Outcome o) {
  switch (o) {
    case Outcome::terminated: return kOk;
    case Outcome::failure: return kPlayFailure;
    case Outcome::timeout: return kTimeout;
    case Outcome::invariant_violation: return kInvariantViolation;
  }
  return kPlayFailure;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("WINDWARD_OUT_DIR")) return env;
  return "out";
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& args, nlohmann::ordered_json extra) {
  nlohmann::ordered_json m;
  m["tool"] = "windward";
  m["version"] = kVersion;
  m["command"] = command;
  m["args"] = args;
  for (auto& [k, v] : extra.items()) m[k] = v;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["written_utc"] = buf;
  std::ofstream os(dir / "manifest.json");
  os << m.dump(2) << "\n";
}

std::vector<std::string> collect_args(int argc, char** argv) {
  return std::vector<std::string>(argv + 1, argv + argc);
}

DisturbanceMode parse_dist(const std::string& s) {
  if (s == "none") return DisturbanceMode::none;
  if (s == "wind") return DisturbanceMode::wind;
  if (s == "worst") return DisturbanceMode::worst;
  throw CLI::ValidationError("--dist must be none|wind|worst");
}

PolicyFlavor parse_policy(const std::string& s) {
  if (s == "nonstat") return PolicyFlavor::nonstationary;
  if (s == "quasi") return PolicyFlavor::quasistationary;
  throw CLI::ValidationError("--policy must be nonstat|quasi");
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& task_path) {
  TaskFile tf;
  try {
    tf = load_task(task_path);
  } catch (const Error& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kValidation;
  }
  const auto perf = check_perforation(tf.task);
  std::cout << "valid: " << (tf.task.name.empty() ? task_path : tf.task.name) << " ("
            << tf.task.n() << " waypoints, " << tf.task.obstacles.size()
            << " obstacle cells, tube witness " << perf.witness.size() << " cells)\n";
  return kOk;
}

// --- solve ------------------------------------------------------------------

HybridState canonical_state(const TaskFile& tf, int segment, Mode mode) {
  const int n = tf.task.n();
  switch (mode) {
    case Mode::depart:
      if (segment != 1) throw Error("depart solves segment 1");
      break;
    case Mode::cruise:
      if (segment < 2 || segment > n - 2)
        throw Error("cruise segments run 2.." + std::to_string(n - 2));
      break;
    case Mode::arrive:
      if (segment != n - 1) throw Error("arrive solves segment " + std::to_string(n - 1));
      break;
    default:
      throw Error("standby has no modal game");
  }
  return {mode, {tf.task.waypoint(segment), {0, 0, 0}, segment + 1}};
}

int cmd_solve(const std::string& task_path, int segment, const std::string& mode_name,
              const std::string& out, bool dump_table, bool no_early_stop,
              const std::vector<std::string>& args) {
  TaskFile tf;
  try {
    tf = load_task(task_path);
  } catch (const Error& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kValidation;
  }
  fs::create_directories(out);
  write_manifest(out, "solve", args,
                 {{"task", task_path}, {"segment", segment}, {"mode", mode_name}});

  Solution sol;
  try {
    HybridState s = canonical_state(tf, segment, mode_from_string(mode_name));
    SolveOptions so;
    so.early_stop = !no_early_stop;
    so.keep_values = dump_table;
    sol = solve_with_extension(s, tf.task, tf.params, so);
  } catch (const UnsolvableError& e) {
    std::cerr << "unsolvable: " << e.what() << "\n";
    std::ofstream os(fs::path(out) / "solve_stats.txt");
    os << "unsolvable=1\nlast_winning=" << e.last_winning_count
       << "\nextensions=" << e.attempts << "\n";
    return kUnsolvable;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }

  {
    std::ofstream os(fs::path(out) / "solve_stats.txt");
    os << "states=" << sol.stats.states << "\n";
    os << "backups=" << sol.stats.backups << "\n";
    os << "wall_seconds=" << sol.stats.wall_seconds << "\n";
    os << "backups_per_second="
       << (sol.stats.wall_seconds > 0
               ? static_cast<double>(sol.stats.backups) / sol.stats.wall_seconds
               : 0)
       << "\n";
    os << "peak_live_cells=" << sol.stats.peak_live_cells << "\n";
    os << "horizon=" << sol.horizon << "\n";
    os << "k_first=" << sol.k_first << "\n";
    os << "k_fp=" << (sol.k_fp ? std::to_string(*sol.k_fp) : "none") << "\n";
    os << "extensions=" << sol.stats.extensions << "\n";
    for (int k = sol.k_first; k <= sol.horizon + 1; ++k)
      os << "winning_stage_" << k << "=" << sol.winning_count(k) << "\n";
  }
  if (dump_table) dump_value_table(sol, (fs::path(out) / "value_table.bin").string());
  std::cout << "solved: " << sol.stats.states << " cells, k_first=" << sol.k_first
            << (sol.k_fp ? " (fixpoint)" : "") << ", |W|=" << sol.winning_count(sol.k_first)
            << ", " << sol.stats.wall_seconds << "s\n";
  return kOk;
}

// --- play -------------------------------------------------------------------

int cmd_play(const std::string& task_path, std::uint64_t seed, int sweep_count,
             const std::string& dist_name, const std::string& policy_name,
             const std::string& out, bool no_early_stop,
             const std::vector<std::string>& args) {
  TaskFile tf;
  try {
    tf = load_task(task_path);
  } catch (const Error& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kValidation;
  }
  fs::create_directories(out);
  write_manifest(out, "play", args,
                 {{"task", task_path},
                  {"seed", seed},
                  {"seeds", sweep_count},
                  {"dist", dist_name},
                  {"policy", policy_name}});

  PlayConfig cfg;
  cfg.disturbance = parse_dist(dist_name);
  cfg.flavor = parse_policy(policy_name);
  cfg.early_stop = !no_early_stop;

  if (sweep_count > 1) {
    SolutionCache cache;
    cfg.cache = &cache;
    std::ofstream os(fs::path(out) / "sweep.txt");
    int worst = kOk;
    std::size_t terminated = 0, unsafe = 0;
    for (int i = 0; i < sweep_count; ++i) {
      cfg.seed = seed + static_cast<std::uint64_t>(i);
      const PlayRecord rec = play(tf.task, tf.params, cfg);
      os << "seed=" << cfg.seed << " outcome=" << to_string(rec.outcome)
         << " steps=" << rec.play_steps() << " unsafe=" << (rec.any_unsafe ? 1 : 0) << "\n";
      worst = std::max(worst, outcome_exit(rec.outcome));
      terminated += rec.outcome == Outcome::terminated;
      unsafe += rec.any_unsafe;
    }
    os << "plays=" << sweep_count << "\n";
    os << "terminated=" << terminated << "\n";
    os << "unsafe_plays=" << unsafe << "\n";
    os << "all_terminated=" << (terminated == static_cast<std::size_t>(sweep_count) ? 1 : 0)
       << "\n";
    std::cout << "sweep: " << terminated << "/" << sweep_count << " terminated, " << unsafe
              << " unsafe plays\n";
    return worst;
  }

  cfg.seed = seed;
  const PlayRecord rec = play(tf.task, tf.params, cfg);
  write_play_csv(rec, (fs::path(out) / "trajectory.csv").string());
  write_play_summary(rec, (fs::path(out) / "summary.txt").string());

  const bool disturbed = cfg.disturbance != DisturbanceMode::none;
  std::vector<PlayStep> ref_steps;
  if (disturbed) {
    PlayConfig ref_cfg = cfg;
    ref_cfg.disturbance = DisturbanceMode::none;
    ref_cfg.cache = nullptr;
    const PlayRecord ref = play(tf.task, tf.params, ref_cfg);
    write_play_csv(ref, (fs::path(out) / "reference.csv").string());
  }
  // Plot from the files just written so re-running the plotter on the CSVs
  // reproduces the artifacts byte for byte.
  const auto primary = parse_play_csv((fs::path(out) / "trajectory.csv").string());
  std::vector<PlayStep> reference;
  if (disturbed) reference = parse_play_csv((fs::path(out) / "reference.csv").string());
  plot::write_scene_svgs(tf.task, tf.params, primary, disturbed,
                         disturbed ? &reference : nullptr,
                         (fs::path(out) / "top.svg").string(),
                         (fs::path(out) / "side.svg").string());

  std::cout << "play: " << to_string(rec.outcome) << " in " << rec.play_steps() << " steps";
  if (!rec.outcome_detail.empty()) std::cout << " (" << rec.outcome_detail << ")";
  std::cout << "\n";
  return outcome_exit(rec.outcome);
}

// --- bench ------------------------------------------------------------------

int cmd_bench(std::int64_t cells, int stages, int reps) {
  if (cells <= 0) {
    std::cout << "nothing to do (0 cells)\n";
    return kOk;
  }
  const std::int64_t vel_cells = 125;  // [-2..2]^3
  const std::int64_t pos_cells = (cells + vel_cells - 1) / vel_cells;
  const int nx = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(pos_cells))));
  const int ny = nx;
  const int nz = static_cast<int>((pos_cells + static_cast<std::int64_t>(nx) * ny - 1) /
                                  (static_cast<std::int64_t>(nx) * ny));

  Task task;
  task.grid = {{0, 0, 0}, {nx - 1, ny - 1, nz - 1}};
  task.route = {{0, 0, 0}, {0, 0, 3}, {nx - 1, ny - 1, 3}, {nx - 1, ny - 1, 0}};
  GameParams params = GameParams::defaults(2, stages);

  ModalGame game;
  game.scope = Scope{Box6{task.grid, {{-2, -2, -2}, {2, 2, 2}}}, 2};
  game.mode = Mode::cruise;
  game.task = &task;
  game.params = &params;
  game.goal_box = {{0, 0, 0}, {1, 1, 1}};
  game.goal_vbox = {{-2, -2, -2}, {2, 2, 2}};
  game.origin = {nx / 2, ny / 2, 2};

  ScopeIndexer idx(game.scope.box);
  std::cout << "scope: " << idx.cells() << " cells (" << nx << "x" << ny << "x" << nz
            << " positions x " << vel_cells << " velocities), |U|="
            << params.control_set.size() << ", |D|=" << params.disturbance_set.size() << "\n";

  std::vector<Cost> v_next(idx.cells());
  for (std::size_t i = 0; i < v_next.size(); ++i) v_next[i] = Cost::finite(i % 997);
  std::vector<Cost> v_out(idx.cells());
  std::vector<std::uint8_t> pol(idx.cells());

  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = stages; k >= 1; --k)
      bellman_backup(game, idx, k, v_next, v_out, pol, {});
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  const double min_t = times.front();
  const double median = times[times.size() / 2];
  const double backups = static_cast<double>(idx.cells()) * stages;
  std::cout << "backups per rep: " << static_cast<std::uint64_t>(backups) << "\n";
  std::cout << "min: " << min_t << " s (" << backups / min_t << " backups/s)\n";
  if (reps > 1) std::cout << "median: " << median << " s\n";
  std::cout << "peak live cells: " << idx.cells() * 2 << "\n";
  return kOk;
}

// --- export / plot ----------------------------------------------------------

int cmd_export(const std::string& scenario, std::uint64_t seed, int nx, int ny, int nz,
               double density, int waypoints, const std::string& out_path) {
  TaskFile tf;
  if (scenario == "random")
    tf = gen_random_scenario(seed, {{0, 0, 0}, {nx - 1, ny - 1, nz - 1}}, density, waypoints);
  else
    tf = builtin_scenario(scenario);
  save_task(tf, out_path);
  std::cout << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_plot(const std::string& task_path, const std::string& csv,
             const std::string& ref_csv, const std::string& out,
             const std::vector<std::string>& args) {
  TaskFile tf;
  try {
    tf = load_task(task_path);
  } catch (const Error& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kValidation;
  }
  fs::create_directories(out);
  write_manifest(out, "plot", args, {{"task", task_path}, {"csv", csv}});
  const auto primary = parse_play_csv(csv);
  std::vector<PlayStep> reference;
  const bool disturbed = !ref_csv.empty();
  if (disturbed) reference = parse_play_csv(ref_csv);
  plot::write_scene_svgs(tf.task, tf.params, primary, disturbed,
                         disturbed ? &reference : nullptr,
                         (fs::path(out) / "top.svg").string(),
                         (fs::path(out) / "side.svg").string());
  std::cout << "wrote " << out << "/top.svg and side.svg\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"windward: robust reach-avoid controller synthesis and hybrid game "
               "simulation on integer grids"};
  app.require_subcommand(1);
  const auto args = collect_args(argc, argv);

  std::string task_path, out_dir = default_out_dir();
  int segment = 2;
  std::string mode_name = "cruise";
  bool dump_table = false, no_early_stop = false;
  std::uint64_t seed = 0;
  int sweep_count = 1;
  std::string dist_name = "wind", policy_name = "nonstat";
  std::int64_t bench_cells = 1'000'000;
  int bench_stages = 1, bench_reps = 1;
  std::string scenario = "mini-yard", export_path = "task.json";
  int gx = 24, gy = 24, gz = 10, gen_waypoints = 5;
  double density = 0.05;
  std::string csv_path, ref_csv;

  auto* validate = app.add_subcommand("validate", "check a task file (route + perforation)");
  validate->add_option("task", task_path)->required();

  auto* solve = app.add_subcommand("solve", "synthesize one modal controller");
  solve->add_option("task", task_path)->required();
  solve->add_option("--segment", segment, "route segment index (1-based)")->required();
  solve->add_option("--mode", mode_name, "depart|cruise|arrive");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_flag("--dump-table", dump_table, "write the binary value-table dump");
  solve->add_flag("--no-early-stop", no_early_stop, "disable the fixpoint approximation");

  auto* playc = app.add_subcommand("play", "play the hybrid game");
  playc->add_option("task", task_path)->required();
  playc->add_option("--seed", seed, "rng seed (sweep base seed)");
  playc->add_option("--seeds", sweep_count, "number of seeds to sweep");
  playc->add_option("--dist", dist_name, "none|wind|worst");
  playc->add_option("--policy", policy_name, "nonstat|quasi");
  playc->add_option("--out", out_dir, "output directory");
  playc->add_flag("--no-early-stop", no_early_stop, "disable the fixpoint approximation");

  auto* bench = app.add_subcommand("bench", "time the backup kernel on a synthetic scope");
  bench->add_option("--cells", bench_cells, "state cells per stage");
  bench->add_option("--stages", bench_stages, "stages per rep");
  bench->add_option("--reps", bench_reps, "repetitions");

  auto* exportc = app.add_subcommand("export", "write a built-in or random scenario file");
  exportc->add_option("--scenario", scenario,
                      "yard|industrial|streets|random-fixture|mini-yard|random");
  exportc->add_option("--seed", seed, "seed (random scenario)");
  exportc->add_option("--nx", gx)->group("random");
  exportc->add_option("--ny", gy)->group("random");
  exportc->add_option("--nz", gz)->group("random");
  exportc->add_option("--density", density)->group("random");
  exportc->add_option("--waypoints", gen_waypoints)->group("random");
  exportc->add_option("out", export_path, "output task file")->required();

  auto* plotc = app.add_subcommand("plot", "regenerate scene drawings from a trajectory CSV");
  plotc->add_option("task", task_path)->required();
  plotc->add_option("--csv", csv_path)->required();
  plotc->add_option("--ref", ref_csv, "reference trajectory CSV");
  plotc->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(task_path);
    if (solve->parsed())
      return cmd_solve(task_path, segment, mode_name, out_dir, dump_table, no_early_stop,
                       args);
    if (playc->parsed())
      return cmd_play(task_path, seed, sweep_count, dist_name, policy_name, out_dir,
                      no_early_stop, args);
    if (bench->parsed()) return cmd_bench(bench_cells, bench_stages, bench_reps);
    if (exportc->parsed())
      return cmd_export(scenario, seed, gx, gy, gz, density, gen_waypoints, export_path);
    if (plotc->parsed()) return cmd_plot(task_path, csv_path, ref_csv, out_dir, args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
