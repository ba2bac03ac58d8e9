#include "windward/player.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "windward/scenario.hpp"

namespace windward {

// ---------------------------------------------------------------------------
// Wind
// ---------------------------------------------------------------------------

std::string_view to_string(WindDirection d) {
  switch (d) {
    case WindDirection::north: return "N";
    case WindDirection::east: return "E";
    case WindDirection::south: return "S";
    case WindDirection::west: return "W";
    case WindDirection::calm: return "calm";
  }
  return "?";
}

GridVec wind_vector(WindDirection d, int magnitude) {
  switch (d) {
    case WindDirection::north: return {0, magnitude, 0};
    case WindDirection::east: return {magnitude, 0, 0};
    case WindDirection::south: return {0, -magnitude, 0};
    case WindDirection::west: return {-magnitude, 0, 0};
    case WindDirection::calm: return {0, 0, 0};
  }
  return {0, 0, 0};
}

namespace {

int ring_index(WindDirection d) { return static_cast<int>(d); }  // N,E,S,W = 0..3

int transition_weight(const WindModel& m, WindDirection from, WindDirection to) {
  if (to == WindDirection::calm) return from == WindDirection::calm ? m.weight_same : m.weight_calm;
  if (from == WindDirection::calm) return m.weight_adjacent;
  const int diff = (ring_index(to) - ring_index(from) + 4) % 4;
  if (diff == 0) return m.weight_same;
  if (diff == 2) return m.weight_opposite;
  return m.weight_adjacent;
}

}  // namespace

std::pair<GridVec, WindState> gen_dist(const WindState& w, const WindModel& model,
                                       std::mt19937_64& rng) {
  WindState next = w;
  if (next.dwell > 0) {
    --next.dwell;
    return {wind_vector(next.direction, model.magnitude), next};
  }
  constexpr std::array<WindDirection, 5> all = {WindDirection::north, WindDirection::east,
                                                WindDirection::south, WindDirection::west,
                                                WindDirection::calm};
  int total = 0;
  std::array<int, 5> acc{};
  for (std::size_t i = 0; i < all.size(); ++i) {
    total += transition_weight(model, w.direction, all[i]);
    acc[i] = total;
  }
  const int draw = static_cast<int>(rng() % static_cast<std::uint64_t>(total));
  std::size_t pick = 0;
  while (draw >= acc[pick]) ++pick;
  next.direction = all[pick];
  const int span = model.dwell_max - model.dwell_min + 1;
  next.dwell = model.dwell_min + static_cast<int>(rng() % static_cast<std::uint64_t>(span)) - 1;
  return {wind_vector(next.direction, model.magnitude), next};
}

// ---------------------------------------------------------------------------
// Task updates
// ---------------------------------------------------------------------------

std::variant<Task, UpdateRejection> upd_task(const Task& task, int at_waypoint,
                                             const TaskUpdate& update) {
  if (at_waypoint < 1 || at_waypoint > task.n())
    return UpdateRejection{"waypoint-index",
                           "update anchor " + std::to_string(at_waypoint) + " outside route"};
  Task next = task;
  if (update.route) {
    const auto& r = *update.route;
    if (static_cast<int>(r.size()) < at_waypoint)
      return UpdateRejection{"route-prefix", "proposed route shorter than the fixed prefix"};
    for (int i = 0; i < at_waypoint; ++i)
      if (r[static_cast<std::size_t>(i)] != task.route[static_cast<std::size_t>(i)])
        return UpdateRejection{"route-prefix",
                               "waypoint " + std::to_string(i + 1) + " differs; only the "
                               "suffix after the current waypoint may change"};
    next.route = r;
  }
  if (update.obstacles) {
    next.obstacles = *update.obstacles;
    next.normalize_obstacles();
  }
  const auto violations = validate_route(next.route, next.grid, next.z_min);
  if (!violations.empty())
    return UpdateRejection{"valid-route", violations.front().clause + ": " +
                                              violations.front().detail};
  if (!check_perforation(next).perforated)
    return UpdateRejection{"perforation", "no obstacle-free tube encloses the updated route"};
  return next;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

std::shared_ptr<const Solution> SolutionCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : it->second;
}

void SolutionCache::store(const std::string& key, std::shared_ptr<const Solution> sol) {
  std::lock_guard lock(mutex_);
  map_.emplace(key, std::move(sol));
}

std::size_t SolutionCache::size() const {
  std::lock_guard lock(mutex_);
  return map_.size();
}

// ---------------------------------------------------------------------------
// Outcome classification
// ---------------------------------------------------------------------------

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::terminated: return "terminated";
    case Outcome::failure: return "failure";
    case Outcome::timeout: return "timeout";
    case Outcome::invariant_violation: return "invariant-violation";
  }
  return "?";
}

std::optional<Outcome> classify(const HybridState& s, int k, const Solution& sol,
                                const PlayConfig& cfg) {
  if (cfg.omega_holds(s)) return Outcome::terminated;
  if (!sol.is_winning(s.x, k)) return Outcome::failure;
  if (k > sol.horizon) return Outcome::timeout;  // beyond the horizon, no stage left to act
  if (!mode_invariant(s, sol.game.scope, *sol.game.params)) return Outcome::invariant_violation;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// The player
// ---------------------------------------------------------------------------

namespace {

std::string scope_key(Mode q, int wp, const Scope& scope, int horizon, DisturbanceMode dist,
                      const SolveOptions& so, int task_version) {
  std::ostringstream k;
  k << to_string(q) << '|' << wp << '|';
  for (const GridVec& v : {scope.box.pos.lo, scope.box.pos.hi, scope.box.vel.lo,
                           scope.box.vel.hi})
    k << v.x << ',' << v.y << ',' << v.z << ';';
  k << horizon << '|' << (dist == DisturbanceMode::none ? "d0" : "dfull") << '|'
    << (so.early_stop ? "fp" : "full") << (so.record_adversary ? "+adv" : "") << "|v"
    << task_version;
  return k.str();
}

bool is_flying(Mode q) { return q != Mode::standby; }

// Alg.-2 loop with a per-scope memo. The player solves without the
// start-state conjunct in the stop rule (cardinality only), which makes the
// tables independent of the entry state: every jump state sharing a scope
// reuses one synthesis, and cached and uncached plays behave identically.
std::shared_ptr<const Solution> solve_for_play(const HybridState& s, const Task& task,
                                               const GameParams& params, SolveOptions so,
                                               DisturbanceMode dist, SolutionCache* cache,
                                               int task_version, int& extensions_out,
                                               bool& cache_hit_out) {
  Scope scope = compute_scope(s, task, params);
  int horizon = params.horizon;
  so.fixpoint_probe.reset();

  std::size_t last_winning = 0;
  cache_hit_out = true;
  for (int attempt = 0;; ++attempt) {
    const Box3 cube = Box3::cube(s.x.p, task.delta_tube).intersect(task.grid);
    const bool cube_inside = !cube.empty() && scope.box.pos.contains(cube.lo) &&
                             scope.box.pos.contains(cube.hi) &&
                             scope.box.vel.contains(s.x.v);
    if (cube_inside) {
      std::shared_ptr<const Solution> sol;
      const std::string key =
          scope_key(s.q, s.x.wp, scope, horizon, dist, so, task_version);
      if (cache) sol = cache->find(key);
      if (!sol) {
        cache_hit_out = false;
        ModalGame game = build_modal_game(s, scope, task, params);
        sol = std::make_shared<Solution>(solve_ddp(game, horizon, so));
        if (cache) cache->store(key, sol);
      }
      if (!sol->stats.unsolvable && sol->fp_u(s.x, sol->k_first)) {
        extensions_out = attempt;
        return sol;
      }
      last_winning = sol->winning_count(sol->k_first);
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

}  // namespace

PlayRecord play(const Task& task0, const GameParams& params, const PlayConfig& cfg) {
  Task task = task0;  // local copy; upd_task may replace route/obstacles
  int task_version = 0;

  GameParams solve_params = params;
  if (cfg.disturbance == DisturbanceMode::none)
    solve_params.disturbance_set = {GridVec{0, 0, 0}};

  if (cfg.disturbance == DisturbanceMode::wind) {
    for (WindDirection d :
         {WindDirection::north, WindDirection::east, WindDirection::south, WindDirection::west})
      if (std::find(params.disturbance_set.begin(), params.disturbance_set.end(),
                    wind_vector(d, cfg.wind.magnitude)) == params.disturbance_set.end())
        throw Error("wind model emits vectors outside the disturbance set");
  }

  std::mt19937_64 rng(cfg.seed);
  WindState wind;

  PlayRecord rec;
  rec.seed = cfg.seed;
  HybridState s{Mode::standby, StateVec{task.waypoint(1), GridVec{0, 0, 0}, 1}};

  int step = 0;
  bool started = false;
  auto push_state = [&](int k, std::string event) {
    rec.steps.push_back({step, s.q, k, s.x, std::nullopt, std::nullopt, std::move(event)});
    if (unsafe_static(s.x.p, task)) rec.any_unsafe = true;
  };
  auto finish = [&](Outcome o, std::string detail) {
    rec.outcome = o;
    rec.outcome_detail = std::move(detail);
  };

  push_state(0, "");

  for (;;) {
    // Guards act as triggers: take jumps as soon as they are enabled.
    for (;;) {
      if (s.q == Mode::standby && started) break;
      const auto evs = enabled_events(s, task, params);
      if (evs.empty()) break;
      const Event e = evs.front();  // deterministic: first available
      const int reached = s.x.wp;
      s = apply_jump(s, e, task, params);
      if (e.kind == EventKind::start) started = true;
      ++step;
      push_state(0, std::string(to_string(e.kind)));
      rec.events.emplace_back(step, std::string(to_string(e.kind)));

      if (e.kind != EventKind::land && cfg.on_waypoint) {
        if (auto upd = cfg.on_waypoint(reached)) {
          auto res = upd_task(task, reached, *upd);
          if (std::holds_alternative<Task>(res)) {
            task = std::get<Task>(std::move(res));
            ++task_version;
            rec.events.emplace_back(step, "task-updated");
          } else {
            const auto& rej = std::get<UpdateRejection>(res);
            rec.events.emplace_back(step, "task-update-rejected:" + rej.predicate);
          }
        }
      }
    }

    if (cfg.omega_holds(s) || s.q == Mode::standby) {
      finish(Outcome::terminated, "");
      return rec;
    }
    if (!is_flying(s.q)) {
      finish(Outcome::invariant_violation, "non-flying mode without an exit");
      return rec;
    }

    // Synthesize the modal controller (online, blocking).
    SolveOptions so;
    so.early_stop = cfg.early_stop;
    so.record_adversary = cfg.disturbance == DisturbanceMode::worst;
    std::shared_ptr<const Solution> sol;
    SegmentStat seg;
    seg.mode = s.q;
    seg.wp = s.x.wp;
    try {
      sol = solve_for_play(s, task, solve_params, so, cfg.disturbance, cfg.cache,
                           task_version, seg.extensions, seg.cache_hit);
    } catch (const UnsolvableError& e) {
      std::ostringstream d;
      d << "unsolvable modal game in mode " << to_string(s.q) << " at waypoint " << s.x.wp
        << " (|W| = " << e.last_winning_count << " after " << e.attempts << " extensions)";
      finish(Outcome::failure, d.str());
      return rec;
    } catch (const Error& e) {
      finish(Outcome::failure, std::string("modal game construction failed: ") + e.what());
      return rec;
    }

    seg.solve_seconds = sol->stats.wall_seconds;
    seg.scope_cells = sol->stats.states;
    seg.k_first = sol->k_first;
    seg.k_fp = sol->k_fp;
    seg.start_value = sol->value_at(s.x, sol->k_first);

    // Play the modal game.
    int k = sol->k_first;
    for (;;) {
      if (!enabled_events(s, task, params).empty()) break;  // guard region entered
      if (auto outcome = classify(s, k, *sol, cfg)) {
        std::ostringstream d;
        d << to_string(*outcome) << " in mode " << to_string(s.q) << " at waypoint " << s.x.wp
          << ", stage " << k;
        rec.segments.push_back(seg);
        finish(*outcome, d.str());
        return rec;
      }
      GridVec d{0, 0, 0};
      switch (cfg.disturbance) {
        case DisturbanceMode::none: break;
        case DisturbanceMode::wind: {
          auto [vec, next] = gen_dist(wind, cfg.wind, rng);
          d = vec;
          wind = next;
          break;
        }
        case DisturbanceMode::worst:
          d = adversary_action(*sol, s.x, k, cfg.flavor);
          break;
      }
      const GridVec u = policy_action(*sol, s.x, k, cfg.flavor);
      seg.accrued_cost += lambda_cost(u, d, s.x, sol->game.origin, params);
      rec.steps.back().u = u;
      rec.steps.back().d = d;
      s.x = step_dynamics(s.x, u, d);
      ++k;
      ++step;
      ++seg.steps;
      push_state(k, "");
    }
    rec.segments.push_back(seg);
  }
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

std::string play_csv(const PlayRecord& rec) {
  std::ostringstream os;
  os << kPlayCsvHeader << '\n';
  for (const PlayStep& st : rec.steps) {
    os << st.step << ',' << to_string(st.mode) << ',' << st.k << ',' << st.x.p.x << ','
       << st.x.p.y << ',' << st.x.p.z << ',' << st.x.v.x << ',' << st.x.v.y << ',' << st.x.v.z
       << ',' << st.x.wp << ',';
    if (st.u)
      os << st.u->x << ',' << st.u->y << ',' << st.u->z << ',';
    else
      os << ",,,";
    if (st.d)
      os << st.d->x << ',' << st.d->y << ',' << st.d->z << ',';
    else
      os << ",,,";
    os << st.event << '\n';
  }
  return os.str();
}

void write_play_csv(const PlayRecord& rec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << play_csv(rec);
  if (!os) throw Error("write to " + path + " failed");
}

std::vector<PlayStep> parse_play_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != kPlayCsvHeader)
    throw Error(path + ": missing or unexpected CSV header");
  std::vector<PlayStep> steps;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else
        cur.push_back(c);
    }
    f.push_back(cur);
    if (f.size() != 17)
      throw Error(path + ":" + std::to_string(lineno) + ": expected 17 fields");
    PlayStep st;
    st.step = std::stoi(f[0]);
    st.mode = mode_from_string(f[1]);
    st.k = std::stoi(f[2]);
    st.x.p = {std::stoi(f[3]), std::stoi(f[4]), std::stoi(f[5])};
    st.x.v = {std::stoi(f[6]), std::stoi(f[7]), std::stoi(f[8])};
    st.x.wp = std::stoi(f[9]);
    if (!f[10].empty()) st.u = GridVec{std::stoi(f[10]), std::stoi(f[11]), std::stoi(f[12])};
    if (!f[13].empty()) st.d = GridVec{std::stoi(f[13]), std::stoi(f[14]), std::stoi(f[15])};
    st.event = f[16];
    steps.push_back(std::move(st));
  }
  return steps;
}

std::string play_summary(const PlayRecord& rec) {
  std::ostringstream os;
  os << "outcome=" << to_string(rec.outcome) << '\n';
  if (!rec.outcome_detail.empty()) os << "outcome_detail=" << rec.outcome_detail << '\n';
  os << "seed=" << rec.seed << '\n';
  os << "play_steps=" << rec.play_steps() << '\n';
  os << "any_unsafe=" << (rec.any_unsafe ? 1 : 0) << '\n';
  os << "segments=" << rec.segments.size() << '\n';
  std::size_t max_cells = 0;
  double total_solve = 0;
  for (std::size_t i = 0; i < rec.segments.size(); ++i) {
    const SegmentStat& sg = rec.segments[i];
    const std::string p = "segment_" + std::to_string(i + 1) + "_";
    os << p << "mode=" << to_string(sg.mode) << '\n';
    os << p << "waypoint=" << sg.wp << '\n';
    os << p << "solve_seconds=" << sg.solve_seconds << '\n';
    os << p << "scope_cells=" << sg.scope_cells << '\n';
    os << p << "k_first=" << sg.k_first << '\n';
    os << p << "k_fp=" << (sg.k_fp ? std::to_string(*sg.k_fp) : "none") << '\n';
    os << p << "extensions=" << sg.extensions << '\n';
    os << p << "start_value=" << sg.start_value << '\n';
    os << p << "accrued_cost=" << sg.accrued_cost << '\n';
    os << p << "steps=" << sg.steps << '\n';
    os << p << "cache_hit=" << (sg.cache_hit ? 1 : 0) << '\n';
    max_cells = std::max(max_cells, sg.scope_cells);
    total_solve += sg.solve_seconds;
  }
  os << "max_scope_cells=" << max_cells << '\n';
  os << "total_solve_seconds=" << total_solve << '\n';
  for (const auto& [at, name] : rec.events) os << "event_" << at << '=' << name << '\n';
  return os.str();
}

void write_play_summary(const PlayRecord& rec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << play_summary(rec);
  if (!os) throw Error("write to " + path + " failed");
}

}  // namespace windward
