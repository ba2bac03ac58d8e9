#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "windward/model.hpp"
#include "windward/solver.hpp"

namespace windward {

// ---------------------------------------------------------------------------
// Wind adversary: semi-Markov with finite memory
// ---------------------------------------------------------------------------

enum class WindDirection : std::uint8_t { north = 0, east = 1, south = 2, west = 3, calm = 4 };

std::string_view to_string(WindDirection d);
GridVec wind_vector(WindDirection d, int magnitude);

struct WindModel {
  int weight_same = 4;
  int weight_adjacent = 2;
  int weight_opposite = 1;
  int weight_calm = 2;
  int dwell_min = 3;
  int dwell_max = 8;
  int magnitude = 1;
};

struct WindState {
  WindDirection direction = WindDirection::calm;
  int dwell = 0;  // remaining steps before the next transition draw
};

/// Emits the current wind vector; when the dwell runs out, samples the next
/// direction (weights favour staying and turning to adjacent compass
/// directions over reversing) and a fresh dwell from [dwell_min, dwell_max].
std::pair<GridVec, WindState> gen_dist(const WindState& w, const WindModel& model,
                                       std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Play configuration and records
// ---------------------------------------------------------------------------

enum class Outcome : std::uint8_t { terminated, failure, timeout, invariant_violation };

std::string_view to_string(Outcome o);

enum class DisturbanceMode : std::uint8_t { none, wind, worst };

/// Restricted task update proposed at a waypoint: a full replacement route
/// (whose prefix up to the waypoint must match) and/or a replacement
/// obstacle cloud.
struct TaskUpdate {
  std::optional<std::vector<GridVec>> route;
  std::optional<std::vector<GridVec>> obstacles;
};

struct UpdateRejection {
  std::string predicate;  // violated predicate name
  std::string detail;
};

/// Accepts the update iff the new task passes validate_route and
/// check_perforation and only the route suffix after waypoint at_waypoint
/// changed; otherwise returns the rejection, leaving the task unchanged.
std::variant<Task, UpdateRejection> upd_task(const Task& task, int at_waypoint,
                                             const TaskUpdate& update);

class SolutionCache {
 public:
  std::shared_ptr<const Solution> find(const std::string& key) const;
  void store(const std::string& key, std::shared_ptr<const Solution> sol);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const Solution>> map_;
};

struct PlayConfig {
  std::uint64_t seed = 0;
  DisturbanceMode disturbance = DisturbanceMode::wind;
  PolicyFlavor flavor = PolicyFlavor::nonstationary;
  bool early_stop = true;  // fixpoint approximation in the modal solves
  WindModel wind;
  /// Termination predicate Ω; plays stop once it holds after the start.
  std::function<bool(const HybridState&)> omega;
  /// Supervisor hook: proposed task update when a waypoint is reached.
  std::function<std::optional<TaskUpdate>(int waypoint)> on_waypoint;
  /// Optional cross-play cache of modal solutions (sweeps).
  SolutionCache* cache = nullptr;

  bool omega_holds(const HybridState& s) const {
    return omega ? omega(s) : s.q == Mode::standby;
  }
};

struct PlayStep {
  int step = 0;
  Mode mode = Mode::standby;
  int k = 0;  // stage within the active modal game, 0 outside one
  StateVec x;
  std::optional<GridVec> u;  // inputs applied from this state
  std::optional<GridVec> d;
  std::string event;  // jump or task-update event recorded at this step
};

struct SegmentStat {
  Mode mode = Mode::cruise;
  int wp = 0;
  double solve_seconds = 0;
  std::size_t scope_cells = 0;
  int k_first = 1;
  std::optional<int> k_fp;
  int extensions = 0;
  Cost start_value;
  std::int64_t accrued_cost = 0;  // λ summed over the modal play
  int steps = 0;
  bool cache_hit = false;
};

struct PlayRecord {
  std::uint64_t seed = 0;
  std::vector<PlayStep> steps;
  std::vector<std::pair<int, std::string>> events;
  Outcome outcome = Outcome::failure;
  std::string outcome_detail;
  std::vector<SegmentStat> segments;
  bool any_unsafe = false;

  int play_steps() const { return steps.empty() ? 0 : steps.back().step; }
};

/// Ω > failure (x outside the winning region at stage k) > timeout
/// (k beyond the horizon) > invariant violation > running (nullopt).
std::optional<Outcome> classify(const HybridState& s, int k, const Solution& sol,
                                const PlayConfig& cfg);

/// Executes the hybrid game from the departure pad: takes the first enabled
/// jump, synthesizes a controller per flying modal game, then steps
/// policy/disturbance pairs until the next guard, Ω, or a non-terminated
/// outcome. Disturbance mode none synthesizes with D = {0}.
PlayRecord play(const Task& task, const GameParams& params, const PlayConfig& cfg);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline constexpr std::string_view kPlayCsvHeader =
    "step,mode,k,p_x,p_y,p_z,v_x,v_y,v_z,i,u_x,u_y,u_z,d_x,d_y,d_z,event";

std::string play_csv(const PlayRecord& rec);
void write_play_csv(const PlayRecord& rec, const std::string& path);
std::vector<PlayStep> parse_play_csv(const std::string& path);

/// Line-oriented key=value summary (outcome, steps, per-segment solver
/// stats, peak scope size).
std::string play_summary(const PlayRecord& rec);
void write_play_summary(const PlayRecord& rec, const std::string& path);

}  // namespace windward
