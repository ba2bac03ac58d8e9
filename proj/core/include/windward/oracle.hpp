#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "windward/model.hpp"
#include "windward/solver.hpp"

namespace windward {

/// Slow, obviously-correct reference computations for tests and acceptance
/// runs. These share the game-model predicates (one source of truth for the
/// goal/unsafe/cost semantics) but none of the solver's code.

struct OracleResult {
  ScopeIndexer indexer;
  int horizon = 0;
  /// Full table, stages 1..N+1 (index k-1), no early stop.
  std::vector<std::vector<Cost>> values;

  Cost value_at(const StateVec& x, int k) const {
    if (!indexer.contains(x.p, x.v)) return Cost::top();
    return values.at(static_cast<std::size_t>(k - 1))[indexer.index(x.p, x.v)];
  }
};

/// Exhaustive minimax value by memoized recursion over (state, stage).
/// Refuses instances above the state-stage cap.
OracleResult oracle_value(const ModalGame& game, int horizon,
                          std::size_t cap = 50'000);

/// Single-player (D = {0}) minimum total stage cost to reach the goal,
/// unbounded horizon: a label-correcting search over predecessors.
/// Returns TOP where the goal is unreachable.
std::vector<Cost> oracle_shortest_costs(const ModalGame& game);
Cost oracle_shortest_cost(const ModalGame& game, const StateVec& x);

/// Plays every disturbance sequence against the fixed policy (memoized on
/// (state, stage); exact because the policy is deterministic). Returns
/// nullopt when every playout stays safe and reaches the goal by stage N,
/// otherwise a violating disturbance sequence.
std::optional<std::vector<GridVec>> adversarial_verify(
    const Solution& sol, const ModalGame& game, const StateVec& x0, int k0,
    PolicyFlavor flavor = PolicyFlavor::nonstationary);

/// Naive sequential flood fill over tube-clear cells; true iff consecutive
/// waypoint neighbourhoods are connected in order. Independent of
/// check_perforation. Refuses grids above the cell cap.
bool tube_oracle(const Task& task, std::int64_t cell_cap = 1'000'000);

}  // namespace windward
