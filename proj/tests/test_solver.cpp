#include <random>

#include "doctest.h"
#include "windward/oracle.hpp"
#include "windward/scenario.hpp"
#include "windward/solver.hpp"

using namespace windward;

namespace {

// 1-D toy: positions 0..4 on the x axis, velocity in {-1,0,1}, goal p = 0,
// U = {-1,0,1} on x, undisturbed.
struct Toy {
  Task task;
  GameParams params;
  ModalGame game;

  Toy() {
    task.grid = {{0, 0, 0}, {4, 0, 0}};
    task.route = {{4, 0, 0}, {4, 0, 1}, {1, 0, 1}, {0, 0, 1}, {0, 0, 0}};  // unused
    params = GameParams::defaults(1, 8);
    params.control_set = {{-1, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    params.disturbance_set = {{0, 0, 0}};
    game.scope = Scope{Box6{{{0, 0, 0}, {4, 0, 0}}, {{-1, 0, 0}, {1, 0, 0}}}, 4};
    game.mode = Mode::cruise;
    game.task = &task;
    game.params = &params;
    game.goal_box = {{0, 0, 0}, {0, 0, 0}};
    game.goal_vbox = {{-1, 0, 0}, {1, 0, 0}};
    game.origin = {0, 0, 0};
  }
};

// Corridor with a wall and unit wind: positions 0..11 x 0..6 x single z,
// goal on the far right.
struct Corridor {
  Task task;
  GameParams params;
  ModalGame game;

  explicit Corridor(bool walled) {
    task.grid = {{0, 0, 0}, {11, 6, 0}};
    task.route = {{0, 3, 0}, {0, 3, 0}, {0, 0, 0}, {0, 0, 0}};  // unused by the game
    task.delta_safe = 1.5;
    if (walled)
      for (int y = 0; y <= 6; ++y) task.obstacles.push_back({6, y, 0});
    params = GameParams::defaults(2, 12);
    params.control_set = axis_boosted_control_set();
    // keep the toy planar
    for (auto it = params.control_set.begin(); it != params.control_set.end();)
      it = it->z != 0 ? params.control_set.erase(it) : std::next(it);
    params.disturbance_set = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    game.scope = Scope{Box6{{{0, 0, 0}, {11, 6, 0}}, {{-2, -2, 0}, {2, 2, 0}}}, 2};
    game.mode = Mode::cruise;
    game.task = &task;
    game.params = &params;
    game.goal_box = {{10, 0, 0}, {11, 6, 0}};
    game.goal_vbox = {{-2, -2, 0}, {2, 2, 0}};
    game.origin = {10, 3, 0};
  }
};

}  // namespace

TEST_CASE("1-D toy equals the exhaustive minimax oracle entry for entry") {
  Toy toy;
  const int horizon = 8;
  SolveOptions so;
  so.early_stop = false;
  so.keep_values = true;
  Solution sol = solve_ddp(toy.game, horizon, so);
  OracleResult ora = oracle_value(toy.game, horizon);

  REQUIRE(sol.k_first == 1);
  for (int k = 1; k <= horizon + 1; ++k)
    for (std::size_t c = 0; c < sol.indexer.cells(); ++c) {
      StateVec x = sol.indexer.decode(c, 4);
      CHECK(sol.values[static_cast<std::size_t>(k - 1)][c] == ora.value_at(x, k));
    }

  // frozen spot values, derived from the oracle: from p=4, v=0 the optimal
  // undisturbed play costs 4^2+1 + 3^2 + 1^2+1 + 0 with the lex tie-break
  // realized by the solver as well.
  CHECK(sol.value_at({{4, 0, 0}, {0, 0, 0}, 4}, 1) == Cost::finite(29));
  CHECK(sol.value_at({{1, 0, 0}, {-1, 0, 0}, 4}, horizon) == Cost::finite(2));
  CHECK(sol.value_at({{0, 0, 0}, {0, 0, 0}, 1}, 1) == Cost::finite(0));
}

TEST_CASE("all-goal games fix immediately at zero") {
  Toy toy;
  toy.game.goal_box = toy.game.scope.box.pos;
  Solution sol = solve_ddp(toy.game, 8, {});
  CHECK(sol.k_fp);
  CHECK(*sol.k_fp == 8);  // first backup already matches the terminal slice
  for (std::size_t c = 0; c < sol.indexer.cells(); ++c)
    CHECK(sol.values.front()[c] == Cost::finite(0));
}

TEST_CASE("a separating wall leaves the far side losing at every stage") {
  Corridor cor(true);
  SolveOptions so;
  so.early_stop = false;
  so.keep_values = true;
  Solution sol = solve_ddp(cor.game, 12, so);
  for (int k = 1; k <= 13; ++k) {
    CHECK(sol.value_at({{0, 3, 0}, {0, 0, 0}, 2}, k).is_top());
    CHECK(sol.value_at({{2, 2, 0}, {1, 0, 0}, 2}, k).is_top());
  }
  CHECK(!sol.value_at({{10, 3, 0}, {0, 0, 0}, 2}, 1).is_top());
}

TEST_CASE("winning regions") {
  Corridor cor(false);
  SolveOptions so;
  so.early_stop = false;
  so.keep_values = true;
  Solution sol = solve_ddp(cor.game, 12, so);

  SUBCASE("terminal region is exactly goal-minus-unsafe") {
    for (const StateVec& x : winning_region(sol, 13)) {
      CHECK(cor.game.is_goal(x));
      CHECK(!cor.game.is_unsafe(x.p));
    }
    std::size_t goal_cells = 0;
    for (std::size_t c = 0; c < sol.indexer.cells(); ++c) {
      StateVec x = sol.indexer.decode(c, 2);
      if (cor.game.is_goal(x) && !cor.game.is_unsafe(x.p)) ++goal_cells;
    }
    CHECK(sol.winning_count(13) == goal_cells);
  }
  SUBCASE("cardinality and finiteness are monotone across stages") {
    for (int k = 1; k < 13; ++k) {
      CHECK(sol.winning_count(k) >= sol.winning_count(k + 1));
      for (std::size_t c = 0; c < sol.indexer.cells(); ++c)
        if (!sol.values[static_cast<std::size_t>(k)][c].is_top())
          CHECK(!sol.values[static_cast<std::size_t>(k - 1)][c].is_top());
    }
  }
  SUBCASE("an all-unsafe scope has an empty region") {
    Corridor bleak(false);
    bleak.task.obstacles.clear();
    bleak.task.grid.for_each_cell([&](GridVec c) { bleak.task.obstacles.push_back(c); });
    bleak.task.normalize_obstacles();
    CHECK_THROWS_AS(build_modal_game(HybridState{Mode::cruise, {{0, 3, 0}, {0, 0, 0}, 2}},
                                     bleak.task, bleak.params),
                    EmptyGoalError);
    Solution s2 = solve_ddp(bleak.game, 4, {});
    CHECK(s2.winning_count(s2.k_first) == 0);
    CHECK(s2.stats.unsolvable);
  }
}

TEST_CASE("fixpoint checks") {
  Corridor cor(false);
  SolveOptions so;
  so.early_stop = false;
  Solution sol = solve_ddp(cor.game, 12, so);

  SUBCASE("cardinality equality triggers fp_ddp") {
    // the corridor saturates well before stage 1
    CHECK(sol.winning_count(1) == sol.winning_count(2));
    CHECK(sol.fp_ddp(1, StateVec{{0, 3, 0}, {0, 0, 0}, 2}));
  }
  SUBCASE("delta_tube = 0 reduces fp_u to plain winning membership") {
    Corridor c0(false);
    c0.task.delta_tube = 0;
    Solution s0 = solve_ddp(c0.game, 12, so);
    StateVec x{{0, 3, 0}, {0, 0, 0}, 2};
    CHECK(s0.fp_u(x, 1) == s0.is_winning(x, 1));
  }
  SUBCASE("a cube touching an unsafe cell is not robustly winning") {
    Corridor cw(true);
    cw.game.goal_box = {{0, 0, 0}, {1, 6, 0}};  // goal on the near side of the wall
    cw.game.origin = {0, 3, 0};
    Solution sw = solve_ddp(cw.game, 12, so);
    // (5, 3) is adjacent to the wall at x = 6: its tube cube meets TOP cells
    StateVec near_wall{{5, 3, 0}, {0, 0, 0}, 2};
    CHECK(!sw.fp_u(near_wall, 1));
    StateVec open{{2, 3, 0}, {0, 0, 0}, 2};
    CHECK(sw.is_winning(open, 1));
    CHECK(sw.fp_u(open, 1));
  }
  SUBCASE("early stop realizes a suffix of the stages") {
    SolveOptions fp;
    fp.fixpoint_probe = StateVec{{0, 3, 0}, {0, 0, 0}, 2};
    Solution sf = solve_ddp(cor.game, 12, fp);
    REQUIRE(sf.k_fp);
    CHECK(*sf.k_fp == sf.k_first);
    CHECK(*sf.k_fp < 12);
    CHECK(sf.fp_ddp(sf.k_first, *fp.fixpoint_probe));
  }
}

TEST_CASE("robust invariance: the policy never leaves the winning region") {
  for (bool early : {false, true}) {
    Corridor cor(true);
    cor.game.goal_box = {{9, 0, 0}, {11, 6, 0}};
    // widen the wall door so the game is winnable: open a gap at y = 3
    cor.task.obstacles.clear();
    for (int y = 0; y <= 6; ++y)
      if (y < 2 || y > 4) cor.task.obstacles.push_back({6, y, 0});
    SolveOptions so;
    so.early_stop = early;
    so.fixpoint_probe = StateVec{{0, 3, 0}, {0, 0, 0}, 2};
    Solution sol = solve_ddp(cor.game, 12, so);
    REQUIRE(sol.winning_count(sol.k_first) > 0);
    for (int k = sol.k_first; k <= sol.horizon; ++k) {
      for (const StateVec& x : winning_region(sol, k)) {
        if (cor.game.is_goal(x)) continue;
        GridVec u = policy_action(sol, x, k);
        for (const GridVec& d : sol.disturbances) {
          StateVec succ = step_dynamics(x, u, d);
          CHECK(!cor.game.is_unsafe(succ.p));
          const bool ok = (cor.game.is_goal(succ) && !cor.game.is_unsafe(succ.p)) ||
                          sol.is_winning(succ, std::min(k + 1, sol.horizon + 1));
          CHECK(ok);
        }
      }
    }
  }
}

TEST_CASE("solver output is deterministic") {
  Corridor cor(true);
  SolveOptions so;
  so.keep_values = true;
  so.early_stop = false;
  Solution a = solve_ddp(cor.game, 10, so);
  Solution b = solve_ddp(cor.game, 10, so);
  CHECK(a.values == b.values);
  CHECK(a.policy == b.policy);
  CHECK(a.winning == b.winning);
}

TEST_CASE("scope extension") {
  // Straight corridor task whose wall door lies outside the initial scope:
  // unsolvable at zero extension, solvable after exactly one 2-cell pad.
  Task task;
  task.grid = {{0, 0, 0}, {39, 13, 11}};
  task.route = {{4, 6, 0}, {4, 6, 6}, {26, 6, 6}, {34, 6, 6}, {34, 6, 0}};
  task.z_min = 3;
  for (int y = 0; y <= 8; ++y)
    for (int z = 0; z <= 11; ++z) task.obstacles.push_back({14, y, z});
  task.normalize_obstacles();
  REQUIRE(check_perforation(task).perforated);

  GameParams params = GameParams::defaults(2, 40);
  params.disturbance_set = {{0, 0, 0}};
  HybridState s{Mode::cruise, {{4, 6, 6}, {0, 0, 0}, 3}};

  SUBCASE("no extension budget: unsolvable") {
    GameParams p0 = params;
    p0.scope_extension = 0;
    CHECK_THROWS_AS(solve_with_extension(s, task, p0, {}), UnsolvableError);
  }
  SUBCASE("one extension suffices and is taken exactly once") {
    Solution sol = solve_with_extension(s, task, params, {});
    CHECK(sol.stats.extensions == 1);
    CHECK(sol.fp_u(s.x, sol.k_first));
  }
  SUBCASE("a fully walled start exhausts the retry cap") {
    Task sealed = task;
    for (int y = 0; y <= 13; ++y)
      for (int z = 0; z <= 11; ++z) sealed.obstacles.push_back({14, y, z});
    sealed.normalize_obstacles();
    try {
      solve_with_extension(s, sealed, params, {});
      FAIL("expected UnsolvableError");
    } catch (const UnsolvableError& e) {
      CHECK(e.attempts == params.extension_retries);
    }
  }
}

TEST_CASE("policies: lookups, quasi-stationary slice, absorbing goal") {
  Corridor cor(false);
  SolveOptions so;
  so.fixpoint_probe = StateVec{{0, 3, 0}, {0, 0, 0}, 2};
  Solution sol = solve_ddp(cor.game, 12, so);
  REQUIRE(sol.k_fp);

  SUBCASE("goal states hold position") {
    CHECK(policy_action(sol, {{10, 3, 0}, {0, 0, 0}, 2}, sol.k_first) == GridVec{0, 0, 0});
  }
  SUBCASE("out-of-region lookups fail loudly") {
    Corridor walled(true);
    Solution lost = solve_ddp(walled.game, 12, {});
    CHECK_THROWS_AS(policy_action(lost, {{0, 3, 0}, {0, 0, 0}, 2}, lost.k_first),
                    OutOfDomainError);
    CHECK_THROWS_AS(policy_action(sol, {{0, 3, 0}, {0, 0, 0}, 2}, sol.horizon + 2),
                    OutOfDomainError);
  }
  SUBCASE("quasi-stationary reuses the fixpoint slice at every stage") {
    const auto& slice = quasi_stationary(sol);
    for (const StateVec& x : winning_region(sol, *sol.k_fp)) {
      const GridVec expect = sol.controls[slice[sol.indexer.index(x.p, x.v)]];
      for (int k = sol.k_first; k <= sol.horizon; ++k)
        CHECK(policy_action(sol, x, k, PolicyFlavor::quasistationary) == expect);
    }
  }
  SUBCASE("no fixpoint, no quasi-stationary policy") {
    SolveOptions full;
    full.early_stop = false;
    Solution nofp = solve_ddp(cor.game, 12, full);
    CHECK(!nofp.k_fp);
    CHECK_THROWS_AS(quasi_stationary(nofp), Error);
  }
}

TEST_CASE("value-table dump round-trips") {
  Toy toy;
  SolveOptions so;
  so.early_stop = false;
  so.keep_values = true;
  Solution sol = solve_ddp(toy.game, 6, so);
  const std::string path = "toy_table.bin";
  dump_value_table(sol, path);
  ValueTableDump d = load_value_table(path);
  CHECK(d.box == toy.game.scope.box);
  CHECK(d.horizon == 6);
  CHECK(d.k_first == 1);
  REQUIRE(d.slices.size() == sol.values.size());
  for (std::size_t i = 0; i < d.slices.size(); ++i) CHECK(d.slices[i] == sol.values[i]);
  std::remove(path.c_str());
}
