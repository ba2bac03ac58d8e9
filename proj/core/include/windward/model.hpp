#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "windward/cost.hpp"
#include "windward/errors.hpp"
#include "windward/geometry.hpp"

namespace windward {

// ---------------------------------------------------------------------------
// Modes and states
// ---------------------------------------------------------------------------

enum class Mode : std::uint8_t { standby = 0, depart = 1, cruise = 2, arrive = 3 };

constexpr std::array<Mode, 4> kAllModes = {Mode::standby, Mode::depart, Mode::cruise,
                                           Mode::arrive};

std::string_view to_string(Mode q);
Mode mode_from_string(std::string_view name);

/// Continuous part of a hybrid state: position, velocity, next-waypoint
/// index (1-based into the route).
struct StateVec {
  GridVec p;
  GridVec v;
  int wp = 1;

  friend constexpr bool operator==(const StateVec&, const StateVec&) = default;
};

struct HybridState {
  Mode q = Mode::standby;
  StateVec x;

  friend constexpr bool operator==(const HybridState&, const HybridState&) = default;
};

// ---------------------------------------------------------------------------
// Task and game parameters
// ---------------------------------------------------------------------------

/// A problem instance: scenery grid, route waypoints, fixed obstacle cloud
/// and the two robustness radii (norm-ball delta_safe for collisions,
/// cube delta_tube for route perforation).
struct Task {
  Box3 grid;
  std::vector<GridVec> route;      // p_1..p_n, 1-based access via waypoint()
  std::vector<GridVec> obstacles;  // sorted, unique cells
  int z_min = 3;
  double delta_safe = 1.5;
  int delta_tube = 1;
  std::string name;
  std::string provenance;

  int n() const { return static_cast<int>(route.size()); }
  const GridVec& waypoint(int i) const { return route.at(static_cast<std::size_t>(i - 1)); }

  /// Squared safety radius as an integer; all collision checks compare
  /// squared distances so the core stays float-free.
  std::int64_t delta_safe_sq() const {
    return static_cast<std::int64_t>(delta_safe * delta_safe + 1e-9);
  }

  void normalize_obstacles();  // sort + dedup

  friend bool operator==(const Task&, const Task&) = default;
};

using Mat3 = std::array<std::array<int, 3>, 3>;
using Mat6 = std::array<std::array<int, 6>, 6>;

constexpr Mat3 identity3() {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = 1;
  return m;
}
constexpr Mat3 zero3() { return Mat3{}; }
constexpr Mat6 identity6() {
  Mat6 m{};
  for (int i = 0; i < 6; ++i) m[i][i] = 1;
  return m;
}

/// All control vectors in [-mag..mag]^3, lexicographically sorted.
std::vector<GridVec> cube_control_set(int mag);
/// {0} plus the four horizontal compass directions scaled by mag.
std::vector<GridVec> horizontal_disturbance_set(int mag);

struct GameParams {
  std::vector<GridVec> control_set;      // U, lex-sorted, contains 0
  std::vector<GridVec> disturbance_set;  // D, contains 0
  int v_max = 10;
  int horizon = 30;                       // N
  std::array<int, 4> pad_p{2, 2, 2, 2};   // δ_{p,q}, indexed by Mode
  std::array<int, 4> pad_v{2, 2, 10, 2};  // δ_{v,q}; cruise defaults to v_max
  Mat6 p_cost = identity6();
  Mat3 q_cost = identity3();
  Mat3 r_cost = zero3();
  int scope_extension = 2;    // Δ_X, position padding per retry
  int temporal_extension = 0; // δ_I, horizon growth per retry
  int extension_retries = 3;

  static GameParams defaults(int v_max = 10, int horizon = 30);

  int pad_p_for(Mode q) const { return pad_p[static_cast<int>(q)]; }
  int pad_v_for(Mode q) const { return pad_v[static_cast<int>(q)]; }

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

/// Gravity is compensated by lower-level control and excluded from the
/// isolated dynamics; kept only as a model constant.
inline constexpr GridVec kGravity{0, 0, -10};

// ---------------------------------------------------------------------------
// Dynamics, scopes, predicates
// ---------------------------------------------------------------------------

/// Forward-Euler successor of the isolated dynamics with unit time step:
/// p' = p + v, v' = v + u + d, waypoint index unchanged.
constexpr StateVec step_dynamics(const StateVec& x, GridVec u, GridVec d) {
  return {x.p + x.v, x.v + u + d, x.wp};
}

/// True iff some obstacle lies within delta_safe of p (squared-integer
/// comparison).
bool unsafe_static(GridVec p, const Task& task);

/// Per-modal-game state space: a box in (p, v) with a fixed waypoint index.
struct Scope {
  Box6 box;
  int wp = 1;

  friend bool operator==(const Scope&, const Scope&) = default;
};

/// Transition cuboid around the current route segment.
/// depart/arrive/standby: column centered at (p_i, 0), z from the ground to
/// max(p_z, p_{i,z}) plus padding. cruise: bounding box of the segment
/// [p, p_i] padded in every position dimension. Velocity extent ±δ_{v,q},
/// clamped to ±v_max; position intersected with the grid.
/// Throws DegenerateScopeError if the intersection is empty.
Scope compute_scope(const HybridState& s, const Task& task, const GameParams& params);

/// Mode the next jump leads to. standby→depart, depart→cruise,
/// cruise→cruise (below n-1) or arrive, arrive→standby.
Mode successor_mode(Mode q, int wp, int n);

/// s++_{q'} = (q', (p_i, 0, i+1)): the jump-target state used to compute
/// goal regions. Throws NoSuccessorError when i+1 exceeds the route.
HybridState jump_target(const HybridState& s, const Task& task);

/// Position projection of the jump-target scope (the goal region ρ).
/// Throws NoSuccessorError for arrive/standby states, whose exit is the
/// landing predicate rather than a successor scope.
Box3 goal_region(const HybridState& s, const Task& task, const GameParams& params);

// ---------------------------------------------------------------------------
// Modal games
// ---------------------------------------------------------------------------

/// Reach-avoid integer difference game induced at a hybrid state.
/// goal_box/goal_vbox are the jump-target scope's boxes; arrive games set
/// require_landing (p_z = 0 and v_z = 0) instead of a successor scope's
/// velocity box. origin is the target waypoint used for the change of
/// variables x_iso = x - (p_i, 0, 0) in the stage cost.
struct ModalGame {
  Scope scope;
  Mode mode = Mode::cruise;
  const Task* task = nullptr;
  const GameParams* params = nullptr;
  Box3 goal_box;
  Box3 goal_vbox;
  bool require_landing = false;
  GridVec origin;

  bool is_goal(const StateVec& x) const {
    if (!goal_box.contains(x.p) || !goal_vbox.contains(x.v)) return false;
    if (require_landing && (x.p.z != 0 || x.v.z != 0)) return false;
    return true;
  }
  bool is_unsafe(GridVec p) const { return unsafe_static(p, *task); }
};

/// Builds the modal game for a flying-mode state, deriving scope, goal and
/// origin. Throws EmptyGoalError if goal-minus-unsafe is empty within the
/// scope, DegenerateScopeError on an empty scope.
ModalGame build_modal_game(const HybridState& s, const Task& task, const GameParams& params);

/// Same, but with an explicit (possibly extended) scope.
ModalGame build_modal_game(const HybridState& s, const Scope& scope, const Task& task,
                           const GameParams& params);

/// Quadratic weight term λ(u,d;x,k) = x_isoᵀP x_iso + uᵀQ u + dᵀR d.
std::int64_t lambda_cost(GridVec u, GridVec d, const StateVec& x, GridVec origin,
                         const GameParams& params);

/// Eq-style stage cost: 0 on goal-and-safe, TOP on unsafe, λ otherwise.
Cost stage_cost(GridVec u, GridVec d, const StateVec& x, int k, const ModalGame& game);

/// Terminal cost Φ: 0 on goal-and-safe, TOP otherwise.
Cost terminal_cost(const StateVec& x, const ModalGame& game);

// ---------------------------------------------------------------------------
// Events and jumps
// ---------------------------------------------------------------------------

enum class EventKind : std::uint8_t { start, to_cruise, advance, to_arrive, land };

std::string_view to_string(EventKind e);

struct Event {
  EventKind kind;
  Mode target;

  friend constexpr bool operator==(const Event&, const Event&) = default;
};

/// Guard-satisfied transitions at s. start is globally enabled in standby;
/// segment advancement fires when x enters the jump-target scope box;
/// landing fires on p_z = 0, v_z = 0 inside the standby pad box.
std::vector<Event> enabled_events(const HybridState& s, const Task& task,
                                  const GameParams& params);

/// Applies the event's update: advancement jumps increment the waypoint
/// index and preserve (p, v); landing preserves the state. Throws Error if
/// the event is not enabled.
HybridState apply_jump(const HybridState& s, const Event& e, const Task& task,
                       const GameParams& params);

/// Mode invariant: flying modes require the state inside the given scope
/// box; standby is flow-stable and always satisfied.
bool mode_invariant(const HybridState& s, const Scope& scope, const GameParams& params);

}  // namespace windward
