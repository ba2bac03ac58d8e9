#include "windward/oracle.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace windward {

namespace {

struct OracleRec {
  const ModalGame& game;
  const ScopeIndexer& idx;
  int horizon;
  std::vector<GridVec> controls;  // sorted: same tie-break order as the solver
  // memo[k-1][cell]: computed flag + value
  std::vector<std::vector<std::uint8_t>> done;
  std::vector<std::vector<Cost>> memo;

  Cost value(const StateVec& x, int k) {
    if (!idx.contains(x.p, x.v)) return Cost::top();
    const std::size_t cell = idx.index(x.p, x.v);
    auto& d = done[static_cast<std::size_t>(k - 1)][cell];
    auto& m = memo[static_cast<std::size_t>(k - 1)][cell];
    if (d) return m;
    Cost result;
    if (game.is_unsafe(x.p))
      result = Cost::top();
    else if (game.is_goal(x))
      result = Cost::finite(0);
    else if (k == horizon + 1)
      result = Cost::top();  // terminal_cost off the goal
    else {
      Cost best = Cost::top();
      for (const GridVec& u : controls) {
        Cost worst = Cost::finite(0);
        for (const GridVec& d2 : game.params->disturbance_set) {
          const Cost stage = stage_cost(u, d2, x, k, game);
          const Cost tail = value(step_dynamics(x, u, d2), k + 1);
          const Cost total = stage + tail;
          worst = std::max(worst, total);
          if (worst.is_top()) break;
        }
        best = std::min(best, worst);
      }
      result = best;
    }
    d = 1;
    m = result;
    return result;
  }
};

}  // namespace

OracleResult oracle_value(const ModalGame& game, int horizon, std::size_t cap) {
  ScopeIndexer idx(game.scope.box);
  const std::size_t pairs = idx.cells() * static_cast<std::size_t>(horizon + 1);
  if (pairs > cap)
    throw Error("oracle cap exceeded: " + std::to_string(pairs) + " state-stage pairs");

  OracleRec rec{game, idx, horizon, game.params->control_set, {}, {}};
  std::sort(rec.controls.begin(), rec.controls.end());
  rec.done.assign(static_cast<std::size_t>(horizon + 1),
                  std::vector<std::uint8_t>(idx.cells(), 0));
  rec.memo.assign(static_cast<std::size_t>(horizon + 1),
                  std::vector<Cost>(idx.cells(), Cost::top()));

  OracleResult out;
  out.indexer = idx;
  out.horizon = horizon;
  out.values.assign(static_cast<std::size_t>(horizon + 1), {});
  for (int k = horizon + 1; k >= 1; --k) {
    auto& slice = out.values[static_cast<std::size_t>(k - 1)];
    slice.resize(idx.cells());
    for (std::size_t c = 0; c < idx.cells(); ++c)
      slice[c] = rec.value(idx.decode(c, game.scope.wp), k);
  }
  return out;
}

std::vector<Cost> oracle_shortest_costs(const ModalGame& game) {
  ScopeIndexer idx(game.scope.box);
  const GridVec zero{0, 0, 0};
  std::vector<Cost> dist(idx.cells(), Cost::top());

  using Item = std::pair<std::uint32_t, std::size_t>;  // (cost, cell), min-heap
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

  for (std::size_t c = 0; c < idx.cells(); ++c) {
    const StateVec x = idx.decode(c, game.scope.wp);
    if (!game.is_unsafe(x.p) && game.is_goal(x)) {
      dist[c] = Cost::finite(0);
      heap.emplace(0, c);
    }
  }

  // Backward Dijkstra over reversed edges: a predecessor of (p', v') under
  // control u with d = 0 is (p' - v' + u, v' - u).
  while (!heap.empty()) {
    const auto [dcur, cell] = heap.top();
    heap.pop();
    if (Cost::from_raw(dcur) != dist[cell]) continue;
    const StateVec succ = idx.decode(cell, game.scope.wp);
    for (const GridVec& u : game.params->control_set) {
      const GridVec v = succ.v - u;
      const GridVec p = succ.p - v;
      if (!idx.contains(p, v)) continue;
      const StateVec x{p, v, succ.wp};
      if (game.is_unsafe(x.p) || game.is_goal(x)) continue;
      const std::int64_t lam = lambda_cost(u, zero, x, game.origin, *game.params);
      const Cost cand = saturating_add(lam, Cost::from_raw(dcur));
      const std::size_t ci = idx.index(p, v);
      if (cand < dist[ci]) {
        dist[ci] = cand;
        if (!cand.is_top()) heap.emplace(cand.raw(), ci);
      }
    }
  }
  return dist;
}

Cost oracle_shortest_cost(const ModalGame& game, const StateVec& x) {
  ScopeIndexer idx(game.scope.box);
  if (!idx.contains(x.p, x.v)) return Cost::top();
  return oracle_shortest_costs(game)[idx.index(x.p, x.v)];
}

namespace {

struct VerifyState {
  const Solution& sol;
  const ModalGame& game;
  PolicyFlavor flavor;
  // (cell, stage) -> verdict; 1 ok, 0 failing. The policy is deterministic,
  // so a revisited node has an identical subtree.
  std::unordered_map<std::uint64_t, std::uint8_t> memo;

  std::uint64_t key(std::size_t cell, int k) const {
    return (static_cast<std::uint64_t>(k) << 40) | cell;
  }

  bool ok(const StateVec& x, int k, std::vector<GridVec>& trail) {
    if (game.is_goal(x) && !game.is_unsafe(x.p)) return true;
    if (!sol.in_scope(x)) return false;
    if (game.is_unsafe(x.p)) return false;
    if (k > sol.horizon) return false;  // goal not reached by stage N
    const std::size_t cell = sol.indexer.index(x.p, x.v);
    if (auto it = memo.find(key(cell, k)); it != memo.end()) {
      if (it->second) return true;
      // Re-derive the failing branch so the counterexample trail is complete.
    }
    GridVec u;
    try {
      u = policy_action(sol, x, k, flavor);
    } catch (const Error&) {
      return false;  // outside the winning region
    }
    for (const GridVec& d : sol.disturbances) {
      trail.push_back(d);
      if (!ok(step_dynamics(x, u, d), k + 1, trail)) {
        memo[key(cell, k)] = 0;
        return false;
      }
      trail.pop_back();
    }
    memo[key(cell, k)] = 1;
    return true;
  }
};

}  // namespace

std::optional<std::vector<GridVec>> adversarial_verify(const Solution& sol,
                                                       const ModalGame& game,
                                                       const StateVec& x0, int k0,
                                                       PolicyFlavor flavor) {
  VerifyState vs{sol, game, flavor, {}};
  std::vector<GridVec> trail;
  if (!vs.ok(x0, k0, trail)) return trail;  // empty trail: x0 itself fails
  return std::nullopt;
}

bool tube_oracle(const Task& task, std::int64_t cell_cap) {
  if (task.grid.cell_count() > cell_cap)
    throw Error("tube_oracle: grid above the cell cap");
  if (task.n() < 2) return false;

  Box3Indexer gi(task.grid);
  const int d = task.delta_tube;
  // Clearance recomputed per cell from the raw cloud (no dilation pass).
  std::unordered_set<GridVec, GridVecHash> cloud(task.obstacles.begin(),
                                                 task.obstacles.end());
  auto clear = [&](GridVec c) {
    for (int dx = -d; dx <= d; ++dx)
      for (int dy = -d; dy <= d; ++dy)
        for (int dz = -d; dz <= d; ++dz)
          if (cloud.count(c + GridVec{dx, dy, dz})) return false;
    return true;
  };

  std::vector<std::uint8_t> reached(gi.cells(), 0);
  Box3::cube(task.waypoint(1), d).intersect(task.grid).for_each_cell([&](GridVec c) {
    if (clear(c)) reached[gi.index(c)] = 1;
  });

  for (int seg = 1; seg < task.n(); ++seg) {
    // Depth-first flood from the current set.
    std::vector<std::size_t> stack;
    std::vector<std::uint8_t> visited(gi.cells(), 0);
    for (std::size_t i = 0; i < reached.size(); ++i)
      if (reached[i]) {
        visited[i] = 1;
        stack.push_back(i);
      }
    if (stack.empty()) return false;
    while (!stack.empty()) {
      const GridVec p = gi.decode(stack.back());
      stack.pop_back();
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const GridVec q = p + GridVec{dx, dy, dz};
            if (!task.grid.contains(q)) continue;
            const std::size_t qi = gi.index(q);
            if (visited[qi] || !clear(q)) continue;
            visited[qi] = 1;
            stack.push_back(qi);
          }
    }
    std::vector<std::uint8_t> next(gi.cells(), 0);
    bool any = false;
    Box3::cube(task.waypoint(seg + 1), d).intersect(task.grid).for_each_cell([&](GridVec c) {
      const std::size_t i = gi.index(c);
      if (visited[i]) {
        next[i] = 1;
        any = true;
      }
    });
    if (!any) return false;
    reached = std::move(next);
  }
  return true;
}

}  // namespace windward
