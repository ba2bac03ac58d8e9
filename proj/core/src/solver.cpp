#include "windward/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace windward {

namespace {

// Per-solve caches: predicate masks, quadratic-form tables and the velocity
// transition table. Built once; every backup stage reuses them.
struct BackupContext {
  const ModalGame* game = nullptr;
  const ScopeIndexer* idx = nullptr;
  std::vector<GridVec> controls;
  std::vector<GridVec> disturbances;
  std::vector<std::int64_t> qu;  // u'Qu per control
  std::vector<std::int64_t> rd;  // d'Rd per disturbance
  std::vector<std::int64_t> base;        // x_iso'P x_iso per cell
  std::vector<std::uint8_t> cell_class;  // 0 interior, 1 goal-and-safe, 2 unsafe
  std::vector<std::int32_t> vtrans;      // vel cell x delta -> vel index or -1
  std::vector<std::uint16_t> delta_of;   // (u_i * |D| + d_i) -> delta index
  std::size_t n_deltas = 0;
  std::uint8_t u0_index = 0;
  std::uint8_t d0_index = 0;
};

std::vector<std::uint8_t> unsafe_position_mask(const ModalGame& game, const Box3Indexer& pos) {
  std::vector<std::uint8_t> mask(pos.cells(), 0);
  const Task& task = *game.task;
  const std::int64_t r2 = task.delta_safe_sq();
  const int radius = static_cast<int>(std::sqrt(static_cast<double>(r2)));
  for (const GridVec& o : task.obstacles) {
    for (int dx = -radius; dx <= radius; ++dx)
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dz = -radius; dz <= radius; ++dz) {
          GridVec off{dx, dy, dz};
          if (off.norm2() > r2) continue;
          GridVec c = o + off;
          if (pos.contains(c)) mask[pos.index(c)] = 1;
        }
  }
  return mask;
}

BackupContext build_context(const ModalGame& game, const ScopeIndexer& idx) {
  BackupContext ctx;
  ctx.game = &game;
  ctx.idx = &idx;
  const GameParams& params = *game.params;

  ctx.controls = params.control_set;
  std::sort(ctx.controls.begin(), ctx.controls.end());  // lex tie-break order
  ctx.disturbances = params.disturbance_set;
  if (ctx.controls.size() > 254 || ctx.disturbances.size() > 254)
    throw Error("control/disturbance sets too large for 8-bit policy storage");

  auto find_zero = [](const std::vector<GridVec>& s, const char* what) {
    auto it = std::find(s.begin(), s.end(), GridVec{0, 0, 0});
    if (it == s.end()) throw Error(std::string(what) + " must contain the zero vector");
    return static_cast<std::uint8_t>(it - s.begin());
  };
  ctx.u0_index = find_zero(ctx.controls, "control set");
  ctx.d0_index = find_zero(ctx.disturbances, "disturbance set");

  auto quad3 = [](const Mat3& m, GridVec w) {
    const std::array<std::int64_t, 3> a = {w.x, w.y, w.z};
    std::int64_t c = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c += a[i] * m[i][j] * a[j];
    return c;
  };
  for (const GridVec& u : ctx.controls) ctx.qu.push_back(quad3(params.q_cost, u));
  for (const GridVec& d : ctx.disturbances) ctx.rd.push_back(quad3(params.r_cost, d));

  // Distinct u+d sums and the per-velocity-cell transition table.
  std::map<GridVec, std::uint16_t> delta_index;
  ctx.delta_of.resize(ctx.controls.size() * ctx.disturbances.size());
  for (std::size_t ui = 0; ui < ctx.controls.size(); ++ui)
    for (std::size_t di = 0; di < ctx.disturbances.size(); ++di) {
      GridVec e = ctx.controls[ui] + ctx.disturbances[di];
      auto [it, fresh] =
          delta_index.emplace(e, static_cast<std::uint16_t>(delta_index.size()));
      ctx.delta_of[ui * ctx.disturbances.size() + di] = it->second;
    }
  ctx.n_deltas = delta_index.size();

  const Box3Indexer& vel = idx.vel();
  ctx.vtrans.assign(vel.cells() * ctx.n_deltas, -1);
  for (std::size_t vi = 0; vi < vel.cells(); ++vi) {
    GridVec v = vel.decode(vi);
    for (const auto& [e, ei] : delta_index) {
      GridVec v2 = v + e;
      if (vel.contains(v2))
        ctx.vtrans[vi * ctx.n_deltas + ei] = static_cast<std::int32_t>(vel.index(v2));
    }
  }

  const Box3Indexer& pos = idx.pos();
  std::vector<std::uint8_t> unsafe_mask = unsafe_position_mask(game, pos);

  const std::size_t cells = idx.cells();
  ctx.base.resize(cells);
  ctx.cell_class.resize(cells);
  for (std::size_t pi = 0; pi < pos.cells(); ++pi) {
    GridVec p = pos.decode(pi);
    const bool unsafe = unsafe_mask[pi] != 0;
    const bool goal_pos = game.goal_box.contains(p) && (!game.require_landing || p.z == 0);
    const GridVec dp = p - game.origin;
    for (std::size_t vi = 0; vi < vel.cells(); ++vi) {
      GridVec v = vel.decode(vi);
      const std::size_t cell = pi * vel.cells() + vi;
      if (unsafe) {
        ctx.cell_class[cell] = 2;
      } else if (goal_pos && game.goal_vbox.contains(v) &&
                 (!game.require_landing || v.z == 0)) {
        ctx.cell_class[cell] = 1;
      } else {
        ctx.cell_class[cell] = 0;
      }
      const std::array<std::int64_t, 6> xi = {dp.x, dp.y, dp.z, v.x, v.y, v.z};
      std::int64_t c = 0;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) c += xi[i] * params.p_cost[i][j] * xi[j];
      ctx.base[cell] = c;
    }
  }
  return ctx;
}

void backup_stage(const BackupContext& ctx, int /*k*/, std::span<const Cost> v_next,
                  std::span<Cost> v_out, std::span<std::uint8_t> policy_out,
                  std::span<std::uint8_t> adversary_out) {
  const Box3Indexer& pos = ctx.idx->pos();
  const Box3Indexer& vel = ctx.idx->vel();
  const std::size_t vel_n = vel.cells();
  const std::size_t n_u = ctx.controls.size();
  const std::size_t n_d = ctx.disturbances.size();
  const bool record_adv = !adversary_out.empty();

  // Position blocks of v_next without a single finite entry cannot yield a
  // finite backup; skipping them removes most work while the winning
  // region is still small.
  std::vector<std::uint8_t> block_live(pos.cells(), 0);
  for (std::size_t pi = 0; pi < pos.cells(); ++pi) {
    const Cost* blk = v_next.data() + pi * vel_n;
    for (std::size_t vi = 0; vi < vel_n; ++vi)
      if (!blk[vi].is_top()) {
        block_live[pi] = 1;
        break;
      }
  }

  // Successor values per distinct u+d sum, gathered once per state.
  std::vector<Cost> val_delta(ctx.n_deltas);

  for (std::size_t pi = 0; pi < pos.cells(); ++pi) {
    const GridVec p = pos.decode(pi);
    for (std::size_t vi = 0; vi < vel_n; ++vi) {
      const std::size_t cell = pi * vel_n + vi;
      switch (ctx.cell_class[cell]) {
        case 1:  // absorbing goal
          v_out[cell] = Cost::finite(0);
          policy_out[cell] = ctx.u0_index;
          if (record_adv) adversary_out[cell] = ctx.d0_index;
          continue;
        case 2:  // shielded
          v_out[cell] = Cost::top();
          policy_out[cell] = kNoAction;
          if (record_adv) adversary_out[cell] = kNoAction;
          continue;
        default: break;
      }
      const GridVec v = vel.decode(vi);
      const GridVec p2 = p + v;
      std::size_t succ_pos;
      if (!pos.contains(p2) ||                       // every successor leaves the scope
          !block_live[succ_pos = pos.index(p2)]) {   // or lands in an all-TOP block
        v_out[cell] = Cost::top();
        policy_out[cell] = kNoAction;
        if (record_adv) adversary_out[cell] = kNoAction;
        continue;
      }
      const std::size_t succ_base = succ_pos * vel_n;
      const std::int64_t base = ctx.base[cell];

      const std::int32_t* vt_row = ctx.vtrans.data() + vi * ctx.n_deltas;
      for (std::size_t e = 0; e < ctx.n_deltas; ++e)
        val_delta[e] = vt_row[e] < 0
                           ? Cost::top()  // velocity leaves the scope
                           : v_next[succ_base + static_cast<std::size_t>(vt_row[e])];

      Cost best = Cost::top();
      std::uint8_t best_u = kNoAction;
      std::uint8_t best_d = kNoAction;
      for (std::size_t ui = 0; ui < n_u; ++ui) {
        const std::int64_t lam_u = base + ctx.qu[ui];
        const std::uint16_t* deltas = ctx.delta_of.data() + ui * n_d;
        Cost worst = Cost::finite(0);
        std::uint8_t worst_d = 0;
        bool rejected = false;
        for (std::size_t di = 0; di < n_d; ++di) {
          const Cost tail = val_delta[deltas[di]];
          if (tail.is_top()) {
            rejected = true;
            break;
          }
          const Cost cand = saturating_add(lam_u + ctx.rd[di], tail);
          if (cand > worst) {
            worst = cand;
            worst_d = static_cast<std::uint8_t>(di);
            if (worst >= best) {  // cannot beat the incumbent minimum
              rejected = true;
              break;
            }
          }
        }
        if (rejected || worst.is_top()) continue;
        if (worst < best) {  // strict: first (lex-smallest) u wins ties
          best = worst;
          best_u = static_cast<std::uint8_t>(ui);
          best_d = worst_d;
        }
      }
      v_out[cell] = best;
      policy_out[cell] = best.is_top() ? kNoAction : best_u;
      if (record_adv) adversary_out[cell] = best.is_top() ? kNoAction : best_d;
    }
  }
}

std::vector<Cost> terminal_slice(const BackupContext& ctx) {
  std::vector<Cost> phi(ctx.idx->cells());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = ctx.cell_class[i] == 1 ? Cost::finite(0) : Cost::top();
  return phi;
}

std::vector<bool> winning_bits(std::span<const Cost> slice, std::size_t& count) {
  std::vector<bool> bits(slice.size());
  count = 0;
  for (std::size_t i = 0; i < slice.size(); ++i) {
    if (!slice[i].is_top()) {
      bits[i] = true;
      ++count;
    }
  }
  return bits;
}

// Core of fp_U: the delta_tube cube around x.p, clipped to the grid, must
// lie inside the scope and be winning at a single stage. slices_low_first
// holds the winning slices for stages k..N+1.
bool robust_cube_winning(const Task& task, const ScopeIndexer& idx, const StateVec& x,
                         std::span<const std::vector<bool>* const> slices) {
  if (!idx.vel().contains(x.v)) return false;
  const Box3 cube = Box3::cube(x.p, task.delta_tube).intersect(task.grid);
  if (cube.empty()) return false;
  std::vector<std::size_t> cells;
  bool inside = true;
  cube.for_each_cell([&](GridVec c) {
    if (!inside) return;
    if (!idx.pos().contains(c)) {
      inside = false;
      return;
    }
    cells.push_back(idx.index(c, x.v));
  });
  if (!inside) return false;
  for (const std::vector<bool>* slice : slices) {
    bool all = true;
    for (std::size_t c : cells)
      if (!(*slice)[c]) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

}  // namespace

bool Solution::is_winning(const StateVec& x, int k) const {
  if (!in_scope(x)) return false;
  const int kk = std::clamp(k, k_first, horizon + 1);
  return winning[static_cast<std::size_t>(kk - k_first)][indexer.index(x.p, x.v)];
}

std::size_t Solution::winning_count(int k) const {
  const auto& w = winning.at(static_cast<std::size_t>(k - k_first));
  return static_cast<std::size_t>(std::count(w.begin(), w.end(), true));
}

Cost Solution::value_at(const StateVec& x, int k) const {
  if (!in_scope(x)) return Cost::top();
  const std::size_t slot = static_cast<std::size_t>(k - k_first);
  if (slot >= values.size())
    throw Error("value slice for stage " + std::to_string(k) +
                " was not retained (solve with keep_values)");
  return values[slot][indexer.index(x.p, x.v)];
}

bool Solution::fp_u(const StateVec& x, int k) const {
  std::vector<const std::vector<bool>*> slices;
  for (int kk = std::max(k, k_first); kk <= horizon + 1; ++kk)
    slices.push_back(&winning[static_cast<std::size_t>(kk - k_first)]);
  return robust_cube_winning(*game.task, indexer, x, slices);
}

bool Solution::fp_ddp(int k, const StateVec& x0) const {
  if (k < k_first || k + 1 > horizon + 1) throw Error("fp_ddp: stage not realized");
  return winning_count(k) == winning_count(k + 1) || fp_u(x0, k);
}

void bellman_backup(const ModalGame& game, const ScopeIndexer& idx, int k,
                    std::span<const Cost> v_next, std::span<Cost> v_out,
                    std::span<std::uint8_t> policy_out,
                    std::span<std::uint8_t> adversary_out) {
  BackupContext ctx = build_context(game, idx);
  backup_stage(ctx, k, v_next, v_out, policy_out, adversary_out);
}

std::pair<std::vector<Cost>, std::vector<std::uint8_t>> bellman_backup(
    const ModalGame& game, const ScopeIndexer& idx, int k, std::span<const Cost> v_next) {
  std::vector<Cost> v(idx.cells());
  std::vector<std::uint8_t> pol(idx.cells());
  bellman_backup(game, idx, k, v_next, v, pol, {});
  return {std::move(v), std::move(pol)};
}

namespace {

struct SolveAssets {
  Task task;
  GameParams params;
};

}  // namespace

Solution solve_ddp(const ModalGame& game, int horizon, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (horizon < 1) throw Error("horizon must be at least 1");
  if (game.scope.box.empty()) throw DegenerateScopeError("empty scope");

  ScopeIndexer idx(game.scope.box);
  BackupContext ctx = build_context(game, idx);
  const std::size_t cells = idx.cells();

  Solution sol;
  // Rebind the game onto owned copies so the solution outlives its inputs.
  auto assets = std::make_shared<SolveAssets>(SolveAssets{*game.task, *game.params});
  sol.assets = assets;
  sol.game = game;
  sol.game.task = &assets->task;
  sol.game.params = &assets->params;
  sol.indexer = idx;
  sol.horizon = horizon;
  sol.controls = ctx.controls;
  sol.disturbances = ctx.disturbances;
  sol.stats.states = cells;

  // Slices are produced for k = N+1 down to the stop stage, then reversed.
  std::vector<std::vector<bool>> win_rev;
  std::vector<std::vector<std::uint8_t>> pol_rev, adv_rev;
  std::vector<std::vector<Cost>> val_rev;
  std::vector<std::size_t> count_rev;

  std::vector<Cost> v_next = terminal_slice(ctx);
  {
    std::size_t count = 0;
    win_rev.push_back(winning_bits(v_next, count));
    count_rev.push_back(count);
  }
  if (opts.keep_values) val_rev.push_back(v_next);

  std::optional<int> k_fp;
  int k_last = horizon + 1;
  for (int k = horizon; k >= 1; --k) {
    std::vector<Cost> v_cur(cells);
    std::vector<std::uint8_t> pol(cells);
    std::vector<std::uint8_t> adv;
    if (opts.record_adversary) adv.resize(cells);
    backup_stage(ctx, k, v_next, v_cur, pol,
                 opts.record_adversary ? std::span<std::uint8_t>(adv)
                                       : std::span<std::uint8_t>());
    sol.stats.backups += cells;

    std::size_t count = 0;
    win_rev.push_back(winning_bits(v_cur, count));
    count_rev.push_back(count);
    pol_rev.push_back(std::move(pol));
    if (opts.record_adversary) adv_rev.push_back(std::move(adv));
    if (opts.keep_values) val_rev.push_back(v_cur);

    v_next = std::move(v_cur);
    k_last = k;

    if (opts.early_stop) {
      bool fixpoint = count == count_rev[count_rev.size() - 2];
      if (!fixpoint && opts.fixpoint_probe) {
        std::vector<const std::vector<bool>*> slices;
        for (auto it = win_rev.rbegin(); it != win_rev.rend(); ++it) slices.push_back(&*it);
        fixpoint = robust_cube_winning(*game.task, idx, *opts.fixpoint_probe, slices);
      }
      if (fixpoint) {
        k_fp = k;
        break;
      }
    }
  }

  sol.k_fp = k_fp;
  sol.k_first = k_last;
  std::reverse(win_rev.begin(), win_rev.end());
  std::reverse(pol_rev.begin(), pol_rev.end());
  std::reverse(adv_rev.begin(), adv_rev.end());
  std::reverse(val_rev.begin(), val_rev.end());
  sol.winning = std::move(win_rev);
  sol.policy = std::move(pol_rev);
  sol.adversary = std::move(adv_rev);
  if (opts.keep_values)
    sol.values = std::move(val_rev);
  else
    sol.values.push_back(std::move(v_next));  // earliest realized slice only
  sol.stats.peak_live_cells = cells * (opts.keep_values ? sol.values.size() + 1 : 2);
  sol.stats.unsolvable = sol.winning_count(sol.k_first) == 0;
  sol.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

Solution solve_ddp(const ModalGame& game, const SolveOptions& opts) {
  return solve_ddp(game, game.params->horizon, opts);
}

std::vector<StateVec> winning_region(const Solution& sol, int k) {
  if (k < sol.k_first || k > sol.horizon + 1) throw Error("winning_region: stage not realized");
  const auto& bits = sol.winning[static_cast<std::size_t>(k - sol.k_first)];
  std::vector<StateVec> region;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) region.push_back(sol.indexer.decode(i, sol.game.scope.wp));
  return region;
}

Solution solve_with_extension(const HybridState& s, const Task& task, const GameParams& params,
                              const SolveOptions& opts) {
  Scope scope = compute_scope(s, task, params);
  int horizon = params.horizon;
  SolveOptions o = opts;
  o.fixpoint_probe = s.x;

  std::size_t last_winning = 0;
  for (int attempt = 0;; ++attempt) {
    // The robust-cube check cannot hold while the probe cube pokes out of
    // the scope (typical right after a jump onto the guard surface), so
    // extend without paying for a doomed solve.
    const Box3 cube = Box3::cube(s.x.p, task.delta_tube).intersect(task.grid);
    const bool cube_inside = !cube.empty() && scope.box.pos.contains(cube.lo) &&
                             scope.box.pos.contains(cube.hi) && scope.box.vel.contains(s.x.v);
    if (cube_inside) {
      ModalGame game = build_modal_game(s, scope, task, params);
      Solution sol = solve_ddp(game, horizon, o);
      last_winning = sol.winning_count(sol.k_first);
      if (!sol.stats.unsolvable && sol.fp_u(s.x, sol.k_first)) {
        sol.stats.extensions = attempt;
        return sol;
      }
    }
    if (attempt >= params.extension_retries) {
      std::ostringstream msg;
      msg << "modal game unsolvable after " << attempt << " scope extensions (mode "
          << to_string(s.q) << ", waypoint " << s.x.wp << ", |W| = " << last_winning << ")";
      throw UnsolvableError(msg.str(), last_winning, attempt);
    }
    scope.box.pos = scope.box.pos.padded(params.scope_extension).intersect(task.grid);
    horizon += params.temporal_extension;
  }
}

const std::vector<std::uint8_t>& quasi_stationary(const Solution& sol) {
  if (!sol.k_fp) throw Error("no fixpoint stage; quasi-stationary policy undefined");
  return sol.policy.front();  // k_fp == k_first when present
}

namespace {

GridVec lookup_action(const Solution& sol, const std::vector<std::vector<std::uint8_t>>& table,
                      const std::vector<GridVec>& alphabet, const StateVec& x, int k,
                      PolicyFlavor flavor) {
  if (table.empty()) throw Error("action table not recorded");
  if (!sol.in_scope(x))
    throw OutOfDomainError("state outside the scope");
  int kk;
  if (flavor == PolicyFlavor::quasistationary) {
    if (!sol.k_fp) throw Error("no fixpoint stage; quasi-stationary policy undefined");
    kk = *sol.k_fp;
  } else {
    kk = std::max(k, sol.k_first);  // stages before k_first use the earliest slice
    if (kk > sol.horizon) throw OutOfDomainError("stage beyond the horizon");
  }
  const std::size_t cell = sol.indexer.index(x.p, x.v);
  const std::uint8_t a = table[static_cast<std::size_t>(kk - sol.k_first)][cell];
  if (a == kNoAction) throw OutOfDomainError("state outside the winning region");
  return alphabet[a];
}

}  // namespace

GridVec policy_action(const Solution& sol, const StateVec& x, int k, PolicyFlavor flavor) {
  return lookup_action(sol, sol.policy, sol.controls, x, k, flavor);
}

GridVec adversary_action(const Solution& sol, const StateVec& x, int k, PolicyFlavor flavor) {
  return lookup_action(sol, sol.adversary, sol.disturbances, x, k, flavor);
}

// ---------------------------------------------------------------------------
// Binary value-table dump
// ---------------------------------------------------------------------------

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
               static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(b, 4);
}
void put_i32(std::ostream& os, std::int32_t v) { put_u32(os, static_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw Error("value-table dump truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
std::int32_t get_i32(std::istream& is) { return static_cast<std::int32_t>(get_u32(is)); }

}  // namespace

void dump_value_table(const Solution& sol, const std::string& path) {
  const std::size_t expect = static_cast<std::size_t>(sol.horizon + 2 - sol.k_first);
  if (sol.values.size() != expect)
    throw Error("dump_value_table requires a solve with keep_values");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write("WWVT", 4);
  put_u32(os, 1);
  const Box6& b = sol.game.scope.box;
  for (const GridVec& v : {b.pos.lo, b.pos.hi, b.vel.lo, b.vel.hi}) {
    put_i32(os, v.x);
    put_i32(os, v.y);
    put_i32(os, v.z);
  }
  put_i32(os, sol.game.scope.wp);
  put_i32(os, sol.horizon);
  put_i32(os, sol.k_first);
  put_i32(os, sol.k_fp ? *sol.k_fp : -1);
  put_u32(os, static_cast<std::uint32_t>(sol.indexer.cells()));
  put_u32(os, static_cast<std::uint32_t>(sol.values.size()));
  for (const auto& slice : sol.values)
    for (Cost c : slice) put_u32(os, c.raw());
  if (!os) throw Error("write to " + path + " failed");
}

ValueTableDump load_value_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "WWVT", 4) != 0) throw Error("not a value-table dump");
  if (get_u32(is) != 1) throw Error("unsupported value-table dump version");
  ValueTableDump d;
  auto get_vec = [&] {
    GridVec v;
    v.x = get_i32(is);
    v.y = get_i32(is);
    v.z = get_i32(is);
    return v;
  };
  d.box.pos.lo = get_vec();
  d.box.pos.hi = get_vec();
  d.box.vel.lo = get_vec();
  d.box.vel.hi = get_vec();
  d.wp = get_i32(is);
  d.horizon = get_i32(is);
  d.k_first = get_i32(is);
  const int kfp = get_i32(is);
  if (kfp >= 0) d.k_fp = kfp;
  const std::uint32_t cells = get_u32(is);
  const std::uint32_t n_slices = get_u32(is);
  d.slices.assign(n_slices, std::vector<Cost>(cells));
  for (auto& slice : d.slices)
    for (Cost& c : slice) c = Cost::from_raw(get_u32(is));
  return d;
}

}  // namespace windward
