#include <algorithm>
#include <random>

#include "doctest.h"
#include "windward/oracle.hpp"
#include "windward/scenario.hpp"
#include "windward/solver.hpp"

using namespace windward;

namespace {

struct Pocket {
  Task task;
  GameParams params;
  ModalGame game;

  // Small 3-D pocket game with a few obstacles and unit wind.
  explicit Pocket(bool wind = true) {
    task.grid = {{0, 0, 0}, {7, 5, 3}};
    task.route = {{0, 2, 0}, {0, 2, 2}, {6, 2, 2}, {6, 2, 0}};
    task.obstacles = {{3, 4, 1}, {3, 4, 2}, {3, 0, 1}};
    task.normalize_obstacles();
    params = GameParams::defaults(1, 9);
    params.control_set = cube_control_set(1);
    params.disturbance_set =
        wind ? horizontal_disturbance_set(1) : std::vector<GridVec>{{0, 0, 0}};
    game.scope = Scope{Box6{task.grid, {{-1, -1, -1}, {1, 1, 1}}}, 3};
    game.mode = Mode::cruise;
    game.task = &task;
    game.params = &params;
    game.goal_box = {{5, 1, 1}, {7, 3, 3}};
    game.goal_vbox = {{-1, -1, -1}, {1, 1, 1}};
    game.origin = {6, 2, 2};
  }
};

}  // namespace

TEST_CASE("oracle values are invariant under alphabet reordering") {
  Pocket a, b;
  std::mt19937 rng(5);
  std::shuffle(b.params.control_set.begin(), b.params.control_set.end(), rng);
  std::shuffle(b.params.disturbance_set.begin(), b.params.disturbance_set.end(), rng);
  OracleResult ra = oracle_value(a.game, 6);
  OracleResult rb = oracle_value(b.game, 6);
  CHECK(ra.values == rb.values);
}

TEST_CASE("oracle: all-goal scopes are all zero") {
  Pocket p;
  p.game.goal_box = p.task.grid;
  p.task.obstacles.clear();
  OracleResult r = oracle_value(p.game, 4);
  for (const auto& slice : r.values)
    for (Cost c : slice) CHECK(c == Cost::finite(0));
}

TEST_CASE("oracle enforces its state-stage cap") {
  Pocket p;
  CHECK_THROWS_AS(oracle_value(p.game, 9, 1000), Error);
}

TEST_CASE("undisturbed games reduce to label-correcting shortest costs") {
  Pocket p(false);
  const int horizon = 14;  // ample for every optimal path in the pocket
  SolveOptions so;
  so.early_stop = false;
  so.keep_values = true;
  Solution sol = solve_ddp(p.game, horizon, so);
  std::vector<Cost> dist = oracle_shortest_costs(p.game);
  for (std::size_t c = 0; c < sol.indexer.cells(); ++c) {
    // label-correcting search has no horizon; equality needs N large enough
    CHECK(sol.values.front()[c] == dist[c]);
  }
}

TEST_CASE("adversarial verification") {
  Pocket p;
  SolveOptions so;
  so.early_stop = false;
  Solution sol = solve_ddp(p.game, 9, so);
  StateVec x0{{1, 2, 2}, {0, 0, 0}, 3};
  REQUIRE(sol.is_winning(x0, 1));

  SUBCASE("a winning start verifies against every disturbance sequence") {
    CHECK(!adversarial_verify(sol, p.game, x0, 1));
  }
  SUBCASE("a losing start yields the empty counterexample") {
    StateVec bad{{3, 4, 0}, {1, 1, 0}, 3};  // next to the obstacle column
    REQUIRE(!sol.is_winning(bad, 1));
    auto cex = adversarial_verify(sol, p.game, bad, 1);
    REQUIRE(cex);
    CHECK(cex->empty());
  }
  SUBCASE("corrupting one action toward an obstacle is caught") {
    Solution broken = sol;
    // force the start action straight at the obstacle wall at (3,4,*)
    const GridVec towards{1, 1, 0};
    auto it = std::find(broken.controls.begin(), broken.controls.end(), towards);
    REQUIRE(it != broken.controls.end());
    StateVec mid{{2, 3, 2}, {0, 0, 0}, 3};
    REQUIRE(broken.is_winning(mid, 1));
    for (auto& slice : broken.policy)
      slice[broken.indexer.index(mid.p, mid.v)] =
          static_cast<std::uint8_t>(it - broken.controls.begin());
    auto cex = adversarial_verify(broken, p.game, mid, 1);
    CHECK(cex);
  }
}

TEST_CASE("tube oracle agrees with the perforation checker") {
  SUBCASE("no obstacles: trivially perforated") {
    TaskFile tf = gen_random_scenario(1, {{0, 0, 0}, {15, 15, 7}}, 0.0, 4);
    CHECK(tube_oracle(tf.task));
    CHECK(check_perforation(tf.task).perforated);
  }
  SUBCASE("a separating wall defeats both") {
    TaskFile tf = gen_random_scenario(2, {{0, 0, 0}, {15, 15, 7}}, 0.0, 4);
    Task sealed = tf.task;
    const int cut_x = (sealed.waypoint(2).x + sealed.waypoint(3).x) / 2;
    // guard against degenerate cuts through a waypoint neighbourhood
    for (int y = 0; y <= 15; ++y)
      for (int z = 0; z <= 7; ++z) sealed.obstacles.push_back({cut_x, y, z});
    sealed.normalize_obstacles();
    bool cuts = true;
    for (int i = 1; i <= sealed.n(); ++i)
      if (std::abs(sealed.waypoint(i).x - cut_x) <= sealed.delta_tube + 1) cuts = false;
    if (cuts && sealed.waypoint(2).x != sealed.waypoint(3).x) {
      const bool side_differs = (sealed.waypoint(2).x < cut_x) != (sealed.waypoint(3).x < cut_x);
      if (side_differs) {
        CHECK(!tube_oracle(sealed));
        CHECK(!check_perforation(sealed).perforated);
      }
    }
  }
  SUBCASE("25 seeded random tasks with extra clutter") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 25; ++i) {
      TaskFile tf = gen_random_scenario(1000 + i, {{0, 0, 0}, {17, 17, 8}}, 0.06, 4);
      Task t = tf.task;
      // re-add clutter the generator carved away, flipping some to not-perforated
      for (int j = 0; j < 40; ++j)
        t.obstacles.push_back({static_cast<int>(rng() % 18), static_cast<int>(rng() % 18),
                               static_cast<int>(rng() % 9)});
      t.normalize_obstacles();
      CHECK(check_perforation(t).perforated == tube_oracle(t));
    }
  }
}
