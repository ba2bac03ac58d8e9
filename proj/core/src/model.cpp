#include "windward/model.hpp"

#include <algorithm>
#include <sstream>

namespace windward {

std::string_view to_string(Mode q) {
  switch (q) {
    case Mode::standby: return "standby";
    case Mode::depart: return "depart";
    case Mode::cruise: return "cruise";
    case Mode::arrive: return "arrive";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  for (Mode q : kAllModes)
    if (to_string(q) == name) return q;
  throw Error("unknown mode: " + std::string(name));
}

std::string_view to_string(EventKind e) {
  switch (e) {
    case EventKind::start: return "start";
    case EventKind::to_cruise: return "to_cruise";
    case EventKind::advance: return "advance";
    case EventKind::to_arrive: return "to_arrive";
    case EventKind::land: return "land";
  }
  return "?";
}

void Task::normalize_obstacles() {
  std::sort(obstacles.begin(), obstacles.end());
  obstacles.erase(std::unique(obstacles.begin(), obstacles.end()), obstacles.end());
}

std::vector<GridVec> cube_control_set(int mag) {
  std::vector<GridVec> set;
  set.reserve(static_cast<std::size_t>(2 * mag + 1) * (2 * mag + 1) * (2 * mag + 1));
  for (int x = -mag; x <= mag; ++x)
    for (int y = -mag; y <= mag; ++y)
      for (int z = -mag; z <= mag; ++z) set.push_back({x, y, z});
  return set;  // generation order is lexicographic
}

std::vector<GridVec> horizontal_disturbance_set(int mag) {
  if (mag == 0) return {GridVec{0, 0, 0}};
  return {{-mag, 0, 0}, {0, -mag, 0}, {0, 0, 0}, {0, mag, 0}, {mag, 0, 0}};
}

GameParams GameParams::defaults(int v_max, int horizon) {
  GameParams p;
  p.control_set = cube_control_set(1);
  p.disturbance_set = horizontal_disturbance_set(1);
  p.v_max = v_max;
  p.horizon = horizon;
  p.pad_p = {2, 2, 2, 2};
  p.pad_v = {2, 2, v_max, 2};
  return p;
}

bool unsafe_static(GridVec p, const Task& task) {
  const std::int64_t r2 = task.delta_safe_sq();
  for (const GridVec& o : task.obstacles)
    if ((o - p).norm2() <= r2) return true;
  return false;
}

Scope compute_scope(const HybridState& s, const Task& task, const GameParams& params) {
  const int i = s.x.wp;
  if (i < 1 || i > task.n())
    throw Error("compute_scope: waypoint index " + std::to_string(i) + " outside route");
  const GridVec wp = task.waypoint(i);
  const int dp = params.pad_p_for(s.q);
  const int dv = params.pad_v_for(s.q);

  Box3 pos;
  if (s.q == Mode::cruise) {
    pos = Box3::hull(s.x.p, wp).padded(dp);
  } else {
    // Vertical transition cuboid: column around the waypoint, reaching from
    // the ground to the higher of the two z coordinates plus padding.
    pos.lo = {wp.x - dp, wp.y - dp, 0};
    pos.hi = {wp.x + dp, wp.y + dp, std::max(s.x.p.z, wp.z) + dp};
  }
  pos = pos.intersect(task.grid);

  Box3 vel = Box3::cube({0, 0, 0}, dv).intersect(Box3::cube({0, 0, 0}, params.v_max));

  if (pos.empty() || vel.empty()) {
    std::ostringstream msg;
    msg << "degenerate scope for mode " << to_string(s.q) << " at waypoint " << i;
    throw DegenerateScopeError(msg.str());
  }
  return Scope{Box6{pos, vel}, i};
}

Mode successor_mode(Mode q, int wp, int n) {
  switch (q) {
    case Mode::standby: return Mode::depart;
    case Mode::depart: return Mode::cruise;
    case Mode::cruise: return wp < n - 1 ? Mode::cruise : Mode::arrive;
    case Mode::arrive: return Mode::standby;
  }
  throw Error("successor_mode: bad mode");
}

HybridState jump_target(const HybridState& s, const Task& task) {
  const int i = s.x.wp;
  if (i + 1 > task.n())
    throw NoSuccessorError("no successor waypoint beyond index " + std::to_string(i) +
                           "; the terminal transition is the landing predicate");
  const Mode q2 = successor_mode(s.q, i, task.n());
  return HybridState{q2, StateVec{task.waypoint(i), GridVec{0, 0, 0}, i + 1}};
}

Box3 goal_region(const HybridState& s, const Task& task, const GameParams& params) {
  if (s.q == Mode::arrive)
    throw NoSuccessorError("arrive has no jump-target scope; landing is its exit predicate");
  return compute_scope(jump_target(s, task), task, params).box.pos;
}

namespace {

Scope landing_pad_scope(const Task& task, const GameParams& params) {
  const int n = task.n();
  HybridState pad{Mode::standby, StateVec{task.waypoint(n), GridVec{0, 0, 0}, n}};
  return compute_scope(pad, task, params);
}

void check_goal_nonempty(const ModalGame& g) {
  if (g.goal_vbox.intersect(g.scope.box.vel).empty())
    throw EmptyGoalError("goal velocity box does not meet the scope");
  Box3 reach = g.goal_box.intersect(g.scope.box.pos);
  if (g.require_landing) {
    if (g.goal_vbox.lo.z > 0 || g.goal_vbox.hi.z < 0)
      throw EmptyGoalError("landing goal requires v_z = 0 outside the velocity box");
    reach.lo.z = std::max(reach.lo.z, 0);
    reach.hi.z = std::min(reach.hi.z, 0);
  }
  bool found = false;
  reach.for_each_cell([&](GridVec p) {
    if (!found && !g.is_unsafe(p)) found = true;
  });
  if (!found) throw EmptyGoalError("goal-minus-unsafe is empty within the scope");
}

}  // namespace

ModalGame build_modal_game(const HybridState& s, const Scope& scope, const Task& task,
                           const GameParams& params) {
  if (s.q == Mode::standby) throw Error("standby has no modal game");
  ModalGame g;
  g.scope = scope;
  g.mode = s.q;
  g.task = &task;
  g.params = &params;
  g.origin = task.waypoint(s.x.wp);
  if (s.q == Mode::arrive) {
    Scope pad = landing_pad_scope(task, params);
    g.goal_box = pad.box.pos;
    g.goal_vbox = pad.box.vel;
    g.require_landing = true;
  } else {
    Scope tscope = compute_scope(jump_target(s, task), task, params);
    g.goal_box = tscope.box.pos;
    g.goal_vbox = tscope.box.vel;
  }
  check_goal_nonempty(g);
  return g;
}

ModalGame build_modal_game(const HybridState& s, const Task& task, const GameParams& params) {
  return build_modal_game(s, compute_scope(s, task, params), task, params);
}

std::int64_t lambda_cost(GridVec u, GridVec d, const StateVec& x, GridVec origin,
                         const GameParams& params) {
  const GridVec dp = x.p - origin;
  const std::array<std::int64_t, 6> xi = {dp.x, dp.y, dp.z, x.v.x, x.v.y, x.v.z};
  std::int64_t c = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) c += xi[i] * params.p_cost[i][j] * xi[j];
  const std::array<std::int64_t, 3> uu = {u.x, u.y, u.z};
  const std::array<std::int64_t, 3> dd = {d.x, d.y, d.z};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      c += uu[i] * params.q_cost[i][j] * uu[j];
      c += dd[i] * params.r_cost[i][j] * dd[j];
    }
  return c;
}

Cost stage_cost(GridVec u, GridVec d, const StateVec& x, int k, const ModalGame& game) {
  (void)k;  // reserved for run-time penalties
  if (game.is_unsafe(x.p)) return Cost::top();
  if (game.is_goal(x)) return Cost::finite(0);
  return Cost::finite(
      static_cast<std::uint64_t>(lambda_cost(u, d, x, game.origin, *game.params)));
}

Cost terminal_cost(const StateVec& x, const ModalGame& game) {
  if (!game.is_unsafe(x.p) && game.is_goal(x)) return Cost::finite(0);
  return Cost::top();
}

std::vector<Event> enabled_events(const HybridState& s, const Task& task,
                                  const GameParams& params) {
  std::vector<Event> evs;
  const int n = task.n();
  switch (s.q) {
    case Mode::standby:
      // Globally enabled; the player decides whether to take it again.
      if (s.x.wp + 1 <= n) evs.push_back({EventKind::start, Mode::depart});
      break;
    case Mode::depart: {
      Scope t = compute_scope(jump_target(s, task), task, params);
      if (t.box.contains(s.x.p, s.x.v)) evs.push_back({EventKind::to_cruise, Mode::cruise});
      break;
    }
    case Mode::cruise: {
      Scope t = compute_scope(jump_target(s, task), task, params);
      if (t.box.contains(s.x.p, s.x.v)) {
        if (s.x.wp < n - 1)
          evs.push_back({EventKind::advance, Mode::cruise});
        else
          evs.push_back({EventKind::to_arrive, Mode::arrive});
      }
      break;
    }
    case Mode::arrive: {
      Scope pad = landing_pad_scope(task, params);
      if (s.x.p.z == 0 && s.x.v.z == 0 && pad.box.contains(s.x.p, s.x.v))
        evs.push_back({EventKind::land, Mode::standby});
      break;
    }
  }
  return evs;
}

HybridState apply_jump(const HybridState& s, const Event& e, const Task& task,
                       const GameParams& params) {
  const auto evs = enabled_events(s, task, params);
  if (std::find(evs.begin(), evs.end(), e) == evs.end())
    throw Error(std::string("event ") + std::string(to_string(e.kind)) +
                " is not enabled in mode " + std::string(to_string(s.q)));
  if (e.kind == EventKind::land) return HybridState{Mode::standby, s.x};
  return HybridState{e.target, StateVec{s.x.p, s.x.v, s.x.wp + 1}};
}

bool mode_invariant(const HybridState& s, const Scope& scope, const GameParams& params) {
  if (s.q == Mode::standby) return true;
  return scope.box.contains(s.x.p, s.x.v) && s.x.v.linf() <= params.v_max;
}

}  // namespace windward
