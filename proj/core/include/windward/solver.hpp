#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windward/cost.hpp"
#include "windward/model.hpp"

namespace windward {

/// Dense row-major index over a scope box: dimension order
/// (p_x, p_y, p_z, v_x, v_y, v_z), p_x slowest. index = pos * |vel| + vel.
class ScopeIndexer {
 public:
  ScopeIndexer() = default;
  explicit ScopeIndexer(const Box6& box) : pos_(box.pos), vel_(box.vel) {}

  const Box3Indexer& pos() const { return pos_; }
  const Box3Indexer& vel() const { return vel_; }
  std::size_t cells() const { return pos_.cells() * vel_.cells(); }
  bool contains(GridVec p, GridVec v) const { return pos_.contains(p) && vel_.contains(v); }
  std::size_t index(GridVec p, GridVec v) const {
    return pos_.index(p) * vel_.cells() + vel_.index(v);
  }
  StateVec decode(std::size_t i, int wp) const {
    return {pos_.decode(i / vel_.cells()), vel_.decode(i % vel_.cells()), wp};
  }

 private:
  Box3Indexer pos_;
  Box3Indexer vel_;
};

struct SolveOptions {
  bool early_stop = true;        // apply the approximate fixpoint check
  bool keep_values = false;      // retain every realized value slice
  bool record_adversary = false; // store the maximizing d alongside the policy
  std::optional<StateVec> fixpoint_probe;  // x0 for the robust-cube conjunct
};

struct SolveStats {
  std::size_t states = 0;          // cells per stage slice
  std::uint64_t backups = 0;       // state backups performed
  double wall_seconds = 0;
  std::size_t peak_live_cells = 0; // value cells live at once during backup
  int extensions = 0;              // scope extensions taken (Alg. 2 retries)
  bool unsolvable = false;         // winning region empty at the first realized stage
};

constexpr std::uint8_t kNoAction = 0xFF;

enum class PolicyFlavor : std::uint8_t { nonstationary, quasistationary };

/// Synthesized controller for one modal game: per-stage winning regions,
/// the policy (and optionally the adversary's maximizer and full value
/// tables) over the realized stage range [k_first, N+1].
/// Self-contained: game points into owned copies of the task and params.
struct Solution {
  std::shared_ptr<const void> assets;  // keeps the task/params copies alive
  ModalGame game;
  ScopeIndexer indexer;
  int horizon = 0;   // N; stages run 1..N+1 with the terminal slice at N+1
  int k_first = 1;   // earliest realized stage (k_fp when stopped early)
  std::optional<int> k_fp;
  std::vector<GridVec> controls;      // lex-sorted U the policy indexes into
  std::vector<GridVec> disturbances;  // D in backup order

  // Indexed by [k - k_first]; winning has N+2-k_first entries, policy and
  // adversary N+1-k_first (no action at the terminal stage).
  std::vector<std::vector<bool>> winning;
  std::vector<std::vector<std::uint8_t>> policy;
  std::vector<std::vector<std::uint8_t>> adversary;
  std::vector<std::vector<Cost>> values;  // k_first slice always; all if keep_values

  SolveStats stats;

  bool in_scope(const StateVec& x) const { return indexer.contains(x.p, x.v); }
  bool is_winning(const StateVec& x, int k) const;
  std::size_t winning_count(int k) const;
  Cost value_at(const StateVec& x, int k) const;  // requires a retained slice

  /// Robust-cube check: the delta_tube position cube around x, clipped to
  /// the grid, lies inside the scope and is winning at some common
  /// realized stage k' >= k.
  bool fp_u(const StateVec& x, int k) const;
  /// Approximate fixpoint at stage k: winning-region cardinalities at k and
  /// k+1 agree, or fp_u holds for x0.
  bool fp_ddp(int k, const StateVec& x0) const;
};

/// One backward step: computes the stage-k value and policy slice from the
/// stage-(k+1) slice with step-pre-shielding (a control admitting any
/// disturbance that leaves the scope, hits an unsafe cell or a TOP
/// successor is rejected). Goal-and-safe states are absorbing at 0.
/// Ties in the argmin resolve to the lexicographically smallest u.
void bellman_backup(const ModalGame& game, const ScopeIndexer& idx, int k,
                    std::span<const Cost> v_next, std::span<Cost> v_out,
                    std::span<std::uint8_t> policy_out,
                    std::span<std::uint8_t> adversary_out);

/// Convenience wrapper returning fresh slices.
std::pair<std::vector<Cost>, std::vector<std::uint8_t>> bellman_backup(
    const ModalGame& game, const ScopeIndexer& idx, int k, std::span<const Cost> v_next);

/// Backward DDP over stages N..1 starting from the terminal slice at N+1,
/// stopping early at the first approximate fixpoint when enabled.
Solution solve_ddp(const ModalGame& game, int horizon, const SolveOptions& opts = {});
Solution solve_ddp(const ModalGame& game, const SolveOptions& opts = {});

/// States with a finite value at stage k.
std::vector<StateVec> winning_region(const Solution& sol, int k);

/// Builds the modal game at s (Alg. 2): solves, and while the robust-cube
/// check fails for s.x at the earliest realized stage, pads the scope's
/// position box by the configured extension (and the horizon by the
/// temporal extension) and retries up to the retry cap.
/// Throws UnsolvableError when the cap is exhausted.
Solution solve_with_extension(const HybridState& s, const Task& task,
                              const GameParams& params, const SolveOptions& opts = {});

/// Stage-k_fp policy slice reused for every stage. Throws Error if the
/// solve did not stop at a fixpoint.
const std::vector<std::uint8_t>& quasi_stationary(const Solution& sol);

/// Stored control at (x, k); stages before k_first use the k_first slice.
/// Throws OutOfDomainError outside the winning region.
GridVec policy_action(const Solution& sol, const StateVec& x, int k,
                      PolicyFlavor flavor = PolicyFlavor::nonstationary);

/// Recorded maximizing disturbance at (x, k) (requires record_adversary).
GridVec adversary_action(const Solution& sol, const StateVec& x, int k,
                         PolicyFlavor flavor = PolicyFlavor::nonstationary);

/// Binary value-table dump for debugging and cross-implementation diffing.
/// Layout (little-endian): magic "WWVT", u32 version, 12 x i32 box bounds
/// (pos lo/hi, vel lo/hi), i32 waypoint, i32 horizon, i32 k_first,
/// i32 k_fp (-1 if none), u32 cells, u32 slice count, then slices
/// k_first..N+1 as row-major u32 cost cells with TOP = 0xFFFFFFFF.
/// Requires keep_values.
void dump_value_table(const Solution& sol, const std::string& path);

struct ValueTableDump {
  Box6 box;
  int wp = 0;
  int horizon = 0;
  int k_first = 0;
  std::optional<int> k_fp;
  std::vector<std::vector<Cost>> slices;
};
ValueTableDump load_value_table(const std::string& path);

}  // namespace windward
