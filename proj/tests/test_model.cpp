#include <random>

#include "doctest.h"
#include "windward/model.hpp"
#include "windward/scenario.hpp"

using namespace windward;

namespace {

// Straight corner route on a roomy grid; p_3 = (10,0,5) is approached from
// (0,0,5) and continues to (10,10,5).
Task corner_task() {
  Task t;
  t.grid = {{-20, -20, 0}, {40, 40, 20}};
  t.route = {{0, 0, 0}, {0, 0, 8}, {10, 0, 5}, {10, 10, 5}, {10, 10, 0}};
  t.z_min = 3;
  return t;
}

ModalGame toy_game(const Task& task, const GameParams& params) {
  ModalGame g;
  g.scope = Scope{Box6{{{-5, -5, 0}, {15, 15, 12}}, {{-2, -2, -2}, {2, 2, 2}}}, 3};
  g.mode = Mode::cruise;
  g.task = &task;
  g.params = &params;
  g.goal_box = {{8, -2, 3}, {12, 12, 7}};
  g.goal_vbox = {{-2, -2, -2}, {2, 2, 2}};
  g.origin = {10, 0, 5};
  return g;
}

}  // namespace

TEST_CASE("dynamics: forward-Euler successor, isolated from gravity") {
  // fixed point of the isolated dynamics
  StateVec rest{{0, 0, 0}, {0, 0, 0}, 1};
  CHECK(step_dynamics(rest, {0, 0, 0}, {0, 0, 0}) == rest);

  // hand-applied p' = p + v, v' = v + u + d
  StateVec x{{0, 0, 5}, {1, 0, 0}, 2};
  StateVec next = step_dynamics(x, {0, 1, 0}, {-1, 0, 0});
  CHECK(next.p == GridVec{1, 0, 5});
  CHECK(next.v == GridVec{0, 1, 0});
  CHECK(next.wp == 2);

  // gravity is a model constant only
  CHECK(kGravity == GridVec{0, 0, -10});
}

TEST_CASE("dynamics are linear in the control") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int i = 0; i < 200; ++i) {
    StateVec x{{d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}, 1};
    GridVec u1{d(rng), d(rng), d(rng)}, u2{d(rng), d(rng), d(rng)},
        dist{d(rng), d(rng), d(rng)};
    StateVec a = step_dynamics(x, u1 + u2, dist);
    StateVec b = step_dynamics(x, u1, dist);
    CHECK(a.p == b.p);
    CHECK(a.v == b.v + u2);
  }
}

TEST_CASE("scopes: transition cuboids per mode") {
  Task t = corner_task();
  GameParams p = GameParams::defaults(2, 20);

  SUBCASE("cruise: padded segment bounding box") {
    HybridState s{Mode::cruise, {{0, 0, 5}, {0, 0, 0}, 3}};
    Scope sc = compute_scope(s, t, p);
    CHECK(sc.box.pos == Box3{{-2, -2, 3}, {12, 2, 7}});
    CHECK(sc.box.vel == Box3{{-2, -2, -2}, {2, 2, 2}});
    CHECK(sc.wp == 3);
  }
  SUBCASE("depart: vertical column up to the higher endpoint plus padding") {
    HybridState s{Mode::depart, {{0, 0, 0}, {0, 0, 0}, 2}};
    Scope sc = compute_scope(s, t, p);
    CHECK(sc.box.pos == Box3{{-2, -2, 0}, {2, 2, 10}});
    CHECK(sc.box.vel == Box3{{-2, -2, -2}, {2, 2, 2}});
  }
  SUBCASE("zero padding degenerates to the waypoint column") {
    GameParams p0 = p;
    p0.pad_p = {0, 0, 0, 0};
    p0.pad_v = {0, 0, 0, 0};
    HybridState s{Mode::depart, {{0, 0, 8}, {0, 0, 0}, 2}};
    Scope sc = compute_scope(s, t, p0);
    CHECK(sc.box.pos == Box3{{0, 0, 0}, {0, 0, 8}});
    CHECK(sc.box.vel == Box3{{0, 0, 0}, {0, 0, 0}});
  }
  SUBCASE("grid intersection can make a scope degenerate") {
    Task tiny = t;
    tiny.grid = {{0, 0, 0}, {5, 5, 5}};
    tiny.route[2] = {30, 30, 3};  // waypoint far outside the grid
    HybridState s{Mode::cruise, {{30, 28, 3}, {0, 0, 0}, 3}};
    CHECK_THROWS_AS(compute_scope(s, tiny, p), DegenerateScopeError);
  }
  SUBCASE("scope contains the generating state's clamped projection") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> dp(-15, 35), dv(-6, 6);
    for (int i = 0; i < 200; ++i) {
      HybridState s{Mode::cruise,
                    {{dp(rng), dp(rng), std::abs(dp(rng)) % 20}, {dv(rng), dv(rng), dv(rng)}, 3}};
      if (!t.grid.contains(s.x.p)) continue;
      Scope sc = compute_scope(s, t, p);
      CHECK(sc.box.pos.contains(s.x.p));
      CHECK(sc.box.vel.contains(sc.box.vel.clamp(s.x.v)));
      CHECK(!sc.box.empty());
    }
  }
}

TEST_CASE("static unsafety: squared-integer norm ball") {
  Task t = corner_task();
  SUBCASE("adjacent obstacle is unsafe at the default radius") {
    t.obstacles = {{0, 0, 1}};
    CHECK(t.delta_safe == 1.5);
    CHECK(t.delta_safe_sq() == 2);
    CHECK(unsafe_static({0, 0, 0}, t));
  }
  SUBCASE("full diagonal neighbour is safe") {
    t.obstacles = {{1, 1, 1}};
    CHECK(!unsafe_static({0, 0, 0}, t));
  }
  SUBCASE("empty cloud is safe everywhere") {
    CHECK(!unsafe_static({0, 0, 0}, t));
  }
  SUBCASE("monotone in the obstacle cloud") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(-4, 4);
    for (int i = 0; i < 100; ++i) {
      Task t1 = corner_task(), t2 = corner_task();
      for (int j = 0; j < 6; ++j) {
        GridVec o{d(rng), d(rng), std::abs(d(rng))};
        t2.obstacles.push_back(o);
        if (j % 2 == 0) t1.obstacles.push_back(o);
      }
      GridVec q{d(rng), d(rng), std::abs(d(rng))};
      if (unsafe_static(q, t1)) CHECK(unsafe_static(q, t2));
    }
  }
}

TEST_CASE("goal regions project the jump-target scope") {
  Task t = corner_task();
  GameParams p = GameParams::defaults(2, 20);

  SUBCASE("cruise: next segment cuboid") {
    HybridState s{Mode::cruise, {{0, 0, 5}, {0, 0, 0}, 3}};
    CHECK(goal_region(s, t, p) == Box3{{8, -2, 3}, {12, 12, 7}});
  }
  SUBCASE("depart: the first cruise cuboid, not the climb column") {
    HybridState s{Mode::depart, {{0, 0, 0}, {0, 0, 0}, 2}};
    Box3 g = goal_region(s, t, p);
    CHECK(g == Box3{{-2, -2, 3}, {12, 2, 7}});  // segment (p_2, p_3) padded
    CHECK(g != compute_scope(s, t, p).box.pos);
  }
  SUBCASE("arrive has no jump-target scope") {
    HybridState s{Mode::arrive, {{10, 10, 5}, {0, 0, 0}, 5}};
    CHECK_THROWS_AS(goal_region(s, t, p), NoSuccessorError);
  }
  SUBCASE("goal-minus-unsafe must be non-empty") {
    Task blocked = t;
    // bury the whole next-segment cuboid
    Box3{{6, -4, 1}, {14, 14, 9}}.for_each_cell(
        [&](GridVec c) { blocked.obstacles.push_back(c); });
    blocked.normalize_obstacles();
    HybridState s{Mode::cruise, {{0, 0, 5}, {0, 0, 0}, 3}};
    CHECK_THROWS_AS(build_modal_game(s, blocked, p), EmptyGoalError);
  }
}

TEST_CASE("stage and terminal costs") {
  Task t = corner_task();
  GameParams p = GameParams::defaults(2, 20);
  ModalGame g = toy_game(t, p);

  SUBCASE("goal and safe: zero stage cost") {
    StateVec x{{10, 0, 5}, {0, 0, 0}, 3};
    CHECK(stage_cost({1, 1, 1}, {1, 0, 0}, x, 1, g) == Cost::finite(0));
    CHECK(terminal_cost(x, g) == Cost::finite(0));
  }
  SUBCASE("unsafe dominates, even on the goal") {
    Task tu = t;
    tu.obstacles = {{10, 0, 5}};
    ModalGame gu = toy_game(tu, p);
    StateVec x{{10, 0, 5}, {0, 0, 0}, 3};
    CHECK(stage_cost({0, 0, 0}, {0, 0, 0}, x, 1, gu).is_top());
    CHECK(terminal_cost(x, gu).is_top());
  }
  SUBCASE("interior: quadratic weight term") {
    // x_iso = (1,0,0 | 0,0,0), u = (1,0,0), P = Q = I, R = 0 -> 1 + 1
    StateVec x{{11, 0, 5}, {0, 0, 0}, 3};
    ModalGame g2 = g;
    g2.goal_box = {{20, 20, 20}, {21, 21, 21}};  // move the goal away
    CHECK(stage_cost({1, 0, 0}, {0, 1, 0}, x, 1, g2) == Cost::finite(2));
    CHECK(lambda_cost({0, 0, 0}, {0, 0, 0}, StateVec{{10, 0, 5}, {0, 0, 0}, 3}, g2.origin,
                      p) == 0);  // the waypoint itself costs nothing
  }
  SUBCASE("terminal cost is never finite nonzero") {
    StateVec off{{0, 0, 5}, {1, 0, 0}, 3};
    CHECK(terminal_cost(off, g).is_top());
  }
}

TEST_CASE("events and jumps over the reconstructed mode graph") {
  Task t = corner_task();
  GameParams p = GameParams::defaults(2, 20);
  const int n = t.n();

  SUBCASE("start is globally enabled in standby") {
    HybridState s{Mode::standby, {{0, 0, 0}, {0, 0, 0}, 1}};
    auto evs = enabled_events(s, t, p);
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].kind == EventKind::start);
    HybridState s2 = apply_jump(s, evs[0], t, p);
    CHECK(s2.q == Mode::depart);
    CHECK(s2.x.p == s.x.p);
    CHECK(s2.x.v == s.x.v);
    CHECK(s2.x.wp == 2);
  }
  SUBCASE("no jump while outside the guard region") {
    HybridState s{Mode::cruise, {{2, 0, 5}, {1, 0, 0}, 3}};
    CHECK(enabled_events(s, t, p).empty());
  }
  SUBCASE("the advancement kind depends on the waypoint index") {
    CHECK(n == 5);
    // wp = 3 < n - 1 = 4: stays cruise
    HybridState mid{Mode::cruise, {{9, 0, 5}, {0, 0, 0}, 3}};
    auto evs = enabled_events(mid, t, p);
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].kind == EventKind::advance);
    CHECK(apply_jump(mid, evs[0], t, p).x.wp == 4);
    // wp = n - 1 = 4 and inside the arrive column: to_arrive
    HybridState last{Mode::cruise, {{10, 9, 4}, {0, 0, 0}, 4}};
    auto evs2 = enabled_events(last, t, p);
    REQUIRE(evs2.size() == 1);
    CHECK(evs2[0].kind == EventKind::to_arrive);
  }
  SUBCASE("landing requires ground, zero vertical speed and the pad box") {
    HybridState s{Mode::arrive, {{10, 10, 0}, {0, 0, 0}, n}};
    auto evs = enabled_events(s, t, p);
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].kind == EventKind::land);
    HybridState s2 = apply_jump(s, evs[0], t, p);
    CHECK(s2.q == Mode::standby);
    CHECK(s2.x == s.x);  // state-preserving landing

    HybridState hover{Mode::arrive, {{10, 10, 1}, {0, 0, 0}, n}};
    CHECK(enabled_events(hover, t, p).empty());
    HybridState sinking{Mode::arrive, {{10, 10, 0}, {0, 0, -1}, n}};
    CHECK(enabled_events(sinking, t, p).empty());
  }
  SUBCASE("jumps outside their guard are contract violations") {
    HybridState s{Mode::cruise, {{0, 0, 5}, {0, 0, 0}, 3}};  // not yet in the goal box
    CHECK_THROWS_AS(apply_jump(s, Event{EventKind::advance, Mode::cruise}, t, p), Error);
  }
  SUBCASE("guards met in sequence walk standby through to standby") {
    HybridState s{Mode::standby, {{0, 0, 0}, {0, 0, 0}, 1}};
    std::vector<EventKind> taken;
    // positions chosen inside each successive guard region
    const std::vector<GridVec> positions = {
        {0, 0, 0},   // standby pad (start fires anywhere)
        {0, 0, 5},   // inside segment (p2,p3) cuboid -> to_cruise
        {9, 0, 5},   // inside segment (p3,p4) cuboid -> advance
        {10, 9, 4},  // inside the arrive column -> to_arrive
        {10, 10, 0}  // landed -> land
    };
    for (const GridVec& pos : positions) {
      s.x.p = pos;
      s.x.v = {0, 0, 0};
      auto evs = enabled_events(s, t, p);
      REQUIRE(!evs.empty());
      taken.push_back(evs.front().kind);
      s = apply_jump(s, evs.front(), t, p);
    }
    CHECK(taken == std::vector<EventKind>{EventKind::start, EventKind::to_cruise,
                                          EventKind::advance, EventKind::to_arrive,
                                          EventKind::land});
    CHECK(s.q == Mode::standby);
    CHECK(s.x.wp == n);
  }
}
