#include "windward/scenario.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace windward {

using json = nlohmann::ordered_json;

std::vector<GridVec> axis_boosted_control_set() {
  std::vector<GridVec> set;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y)
      for (int z = -2; z <= 2; ++z) {
        const int boosted = (std::abs(x) == 2) + (std::abs(y) == 2) + (std::abs(z) == 2);
        if (boosted <= 1) set.push_back({x, y, z});
      }
  return set;  // generation order is lexicographic
}

// ---------------------------------------------------------------------------
// Route validation
// ---------------------------------------------------------------------------

std::vector<RouteViolation> validate_route(const std::vector<GridVec>& route, const Box3& grid,
                                           int z_min) {
  std::vector<RouteViolation> out;
  const int n = static_cast<int>(route.size());
  auto add = [&](std::string clause, std::string detail) {
    out.push_back({std::move(clause), std::move(detail)});
  };

  if (n < 4) {
    add("n >= 4", "route has " + std::to_string(n) + " waypoints");
    return out;  // the remaining clauses assume the endpoints exist
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (route[i] == route[j]) {
        std::ostringstream d;
        d << "waypoints " << i + 1 << " and " << j + 1 << " coincide at " << route[i];
        add("waypoints distinct", d.str());
      }
  for (int i = 0; i < n; ++i)
    if (!grid.contains(route[i])) {
      std::ostringstream d;
      d << "waypoint " << i + 1 << " at " << route[i] << " outside grid " << grid;
      add("waypoint in grid", d.str());
    }
  if (route.front().z != 0)
    add("endpoint on ground", "first waypoint at z = " + std::to_string(route.front().z));
  if (route.back().z != 0)
    add("endpoint on ground", "last waypoint at z = " + std::to_string(route.back().z));
  if (route[1].x != route[0].x || route[1].y != route[0].y)
    add("superimposed endpoints", "second waypoint not above the first");
  if (route[n - 2].x != route[n - 1].x || route[n - 2].y != route[n - 1].y)
    add("superimposed endpoints", "second-to-last waypoint not above the last");
  for (int i = 1; i < n - 1; ++i)
    if (route[i].z < z_min) {
      std::ostringstream d;
      d << "waypoint " << i + 1 << " at z = " << route[i].z << " below z_min = " << z_min;
      add("minimum altitude", d.str());
    }
  return out;
}

// ---------------------------------------------------------------------------
// Perforation: sequential BFS over tube-clear cells
// ---------------------------------------------------------------------------

namespace {

struct TubeSearch {
  const Task& task;
  Box3Indexer grid;
  std::vector<std::uint8_t> clear;  // cube(c, delta) avoids the cloud

  explicit TubeSearch(const Task& t) : task(t), grid(t.grid) {
    // Dilating the cloud by the cube marks exactly the non-clear cells.
    std::vector<std::uint8_t> blocked(grid.cells(), 0);
    const int d = task.delta_tube;
    for (const GridVec& o : task.obstacles)
      Box3::cube(o, d).intersect(task.grid).for_each_cell(
          [&](GridVec c) { blocked[grid.index(c)] = 1; });
    clear.resize(grid.cells());
    for (std::size_t i = 0; i < clear.size(); ++i) clear[i] = !blocked[i];
  }

  std::vector<std::size_t> neighbourhood(GridVec w) const {
    std::vector<std::size_t> cells;
    Box3::cube(w, task.delta_tube).intersect(task.grid).for_each_cell([&](GridVec c) {
      std::size_t i = grid.index(c);
      if (clear[i]) cells.push_back(i);
    });
    std::sort(cells.begin(), cells.end());
    return cells;
  }

  // BFS over clear cells with 26-neighbourhood steps; parent[i] = -1 for
  // roots, -2 for unvisited. Deterministic: roots enqueued in sorted order,
  // neighbours expanded in lexicographic offset order.
  void flood(const std::vector<std::size_t>& roots, std::vector<std::int32_t>& parent) const {
    parent.assign(grid.cells(), -2);
    std::deque<std::size_t> queue;
    for (std::size_t r : roots) {
      parent[r] = -1;
      queue.push_back(r);
    }
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const GridVec p = grid.decode(cur);
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const GridVec q = p + GridVec{dx, dy, dz};
            if (!grid.contains(q)) continue;
            const std::size_t qi = grid.index(q);
            if (!clear[qi] || parent[qi] != -2) continue;
            parent[qi] = static_cast<std::int32_t>(cur);
            queue.push_back(qi);
          }
    }
  }
};

}  // namespace

PerforationResult check_perforation(const Task& task) {
  const int n = task.n();
  if (n < 2) return {false, {}};
  TubeSearch search(task);

  // Forward pass: per-segment reachability between waypoint neighbourhoods.
  std::vector<std::vector<std::size_t>> fronts(static_cast<std::size_t>(n));
  fronts[0] = search.neighbourhood(task.waypoint(1));
  if (fronts[0].empty()) return {false, {}};
  std::vector<std::int32_t> parent;
  for (int seg = 1; seg < n; ++seg) {
    search.flood(fronts[seg - 1], parent);
    std::vector<std::size_t> next;
    for (std::size_t c : search.neighbourhood(task.waypoint(seg + 1)))
      if (parent[c] != -2) next.push_back(c);
    if (next.empty()) return {false, {}};
    fronts[static_cast<std::size_t>(seg)] = std::move(next);
  }

  // Witness pass: backtrack segment chains from the lexicographically first
  // reachable cell of the last neighbourhood.
  std::size_t target = fronts[static_cast<std::size_t>(n - 1)].front();
  std::deque<std::size_t> path{target};
  for (int seg = n - 1; seg >= 1; --seg) {
    search.flood(fronts[seg - 1], parent);
    std::size_t cur = target;
    while (parent[cur] >= 0) {
      cur = static_cast<std::size_t>(parent[cur]);
      path.push_front(cur);
    }
    target = cur;  // root of this segment chain, inside the previous front
  }

  PerforationResult res;
  res.perforated = true;
  res.witness.reserve(path.size());
  for (std::size_t c : path) res.witness.push_back(search.grid.decode(c));
  return res;
}

void require_valid(const TaskFile& tf) {
  const auto violations = validate_route(tf.task.route, tf.task.grid, tf.task.z_min);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid route:";
    for (const auto& v : violations) msg << "\n  [" << v.clause << "] " << v.detail;
    throw Error(msg.str());
  }
  if (!check_perforation(tf.task).perforated)
    throw Error("task is not delta-perforated (no obstacle-free tube of radius " +
                std::to_string(tf.task.delta_tube) + " encloses the route)");
}

// ---------------------------------------------------------------------------
// Built-in fixtures
// ---------------------------------------------------------------------------

namespace {

void add_box(std::vector<GridVec>& cells, const Box3& b) {
  b.for_each_cell([&](GridVec c) { cells.push_back(c); });
}

TaskFile make_mini_yard() {
  TaskFile tf;
  Task& t = tf.task;
  t.name = "mini-yard";
  t.provenance = "desk-scale fixture: one wall with a door between the two cruise legs";
  t.grid = {{0, 0, 0}, {33, 29, 11}};
  t.z_min = 3;
  t.delta_safe = 1.5;
  t.delta_tube = 1;
  t.route = {{7, 10, 0}, {7, 10, 6}, {18, 10, 6}, {25, 10, 6}, {25, 10, 0}};
  // Wall across x = 12 with a door; the route threads the door at z = 6.
  for (int y = 0; y <= 29; ++y)
    for (int z = 0; z <= 11; ++z)
      if (y < 6 || y > 14 || z < 3 || z > 9) t.obstacles.push_back({12, y, z});
  t.normalize_obstacles();

  tf.params = GameParams::defaults(3, 26);
  tf.params.control_set = axis_boosted_control_set();
  tf.params.pad_v = {2, 2, 3, 3};
  return tf;
}

TaskFile make_yard() {
  TaskFile tf;
  Task& t = tf.task;
  t.name = "yard";
  t.provenance = "hand-authored domestic yard: house, two trees, a shed";
  t.grid = {{0, 0, 0}, {39, 39, 13}};
  t.z_min = 3;
  t.route = {{6, 6, 0},   {6, 6, 5},   {30, 8, 5}, {30, 28, 6},
             {10, 30, 6}, {10, 30, 0}};
  add_box(t.obstacles, {{14, 10, 0}, {20, 16, 7}});   // house
  add_box(t.obstacles, {{26, 20, 0}, {26, 20, 9}});   // tree
  add_box(t.obstacles, {{12, 24, 0}, {12, 24, 8}});   // tree
  add_box(t.obstacles, {{24, 34, 0}, {27, 37, 4}});   // shed
  t.normalize_obstacles();

  tf.params = GameParams::defaults(5, 30);
  tf.params.control_set = axis_boosted_control_set();
  return tf;
}

TaskFile make_industrial() {
  TaskFile tf;
  Task& t = tf.task;
  t.name = "industrial";
  t.provenance =
      "hand-authored 200x250 industrial area: nine warehouse blocks on a street "
      "grid; 14 route points (13 segments)";
  t.grid = {{0, 0, 0}, {199, 249, 19}};
  t.z_min = 4;
  t.route = {{10, 10, 0},  {10, 10, 8},  {10, 85, 8},   {70, 85, 8},  {70, 155, 8},
             {130, 155, 8}, {130, 85, 8}, {190, 85, 8},  {190, 220, 8}, {100, 220, 8},
             {30, 220, 8},  {30, 236, 8}, {20, 236, 8},  {20, 236, 0}};
  for (int bx = 0; bx < 3; ++bx)
    for (int by = 0; by < 3; ++by) {
      const int x0 = 20 + bx * 60, y0 = 30 + by * 70;
      add_box(t.obstacles, {{x0, y0, 0}, {x0 + 40, y0 + 40, 12}});
    }
  t.normalize_obstacles();

  tf.params = GameParams::defaults(5, 60);
  tf.params.control_set = axis_boosted_control_set();
  return tf;
}

TaskFile make_streets() {
  TaskFile tf;
  Task& t = tf.task;
  t.name = "streets";
  t.provenance =
      "hand-authored 400x450 neighbourhood: city blocks with street canyons; "
      "12 route points (11 segments)";
  t.grid = {{0, 0, 0}, {399, 449, 15}};
  t.z_min = 4;
  t.route = {{90, 10, 0},  {90, 10, 9},  {90, 185, 9},  {170, 185, 9},
             {170, 275, 9}, {250, 275, 9}, {250, 95, 9},  {330, 95, 9},
             {330, 365, 9}, {90, 365, 9},  {90, 420, 9},  {90, 420, 0}};
  for (int bx = 0; bx < 5; ++bx)
    for (int by = 0; by < 5; ++by) {
      const int x0 = 20 + bx * 80, y0 = 20 + by * 90;
      Box3 block{{x0, y0, 0}, {x0 + 60, y0 + 60, 10}};
      add_box(t.obstacles, block.intersect(t.grid));
    }
  t.normalize_obstacles();

  tf.params = GameParams::defaults(5, 50);
  tf.params.control_set = axis_boosted_control_set();
  return tf;
}

TaskFile make_random_fixture() {
  TaskFile tf = gen_random_scenario(20260810, {{0, 0, 0}, {23, 23, 9}}, 0.05, 5);
  tf.task.name = "random-fixture";
  tf.task.provenance = "seeded random obstacle cloud (seed 20260810, density 0.05)";
  return tf;
}

}  // namespace

std::vector<std::string_view> builtin_scenario_names() {
  return {"yard", "industrial", "streets", "random-fixture", "mini-yard"};
}

TaskFile builtin_scenario(std::string_view name) {
  TaskFile tf;
  if (name == "mini-yard")
    tf = make_mini_yard();
  else if (name == "yard")
    tf = make_yard();
  else if (name == "industrial")
    tf = make_industrial();
  else if (name == "streets")
    tf = make_streets();
  else if (name == "random-fixture")
    tf = make_random_fixture();
  else
    throw Error("unknown scenario: " + std::string(name));
  require_valid(tf);
  return tf;
}

// ---------------------------------------------------------------------------
// Random scenario generation
// ---------------------------------------------------------------------------

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::vector<GridVec> staircase(GridVec a, GridVec b) {
  std::vector<GridVec> cells{a};
  GridVec cur = a;
  auto walk = [&](int GridVec::* axis, int target) {
    while (cur.*axis != target) {
      cur.*axis += target > cur.*axis ? 1 : -1;
      cells.push_back(cur);
    }
  };
  walk(&GridVec::x, b.x);
  walk(&GridVec::y, b.y);
  walk(&GridVec::z, b.z);
  return cells;
}

}  // namespace

TaskFile gen_random_scenario(std::uint64_t seed, const Box3& dims, double obstacle_density,
                             int n_waypoints) {
  if (obstacle_density < 0.0 || obstacle_density >= 1.0)
    throw Error("obstacle density must be in [0, 1)");
  if (n_waypoints < 4) throw Error("routes need at least 4 waypoints");

  TaskFile tf;
  Task& t = tf.task;
  t.grid = dims;
  t.z_min = 3;
  t.name = "random";
  {
    std::ostringstream p;
    p << "generated: seed " << seed << ", density " << obstacle_density << ", " << n_waypoints
      << " waypoints";
    t.provenance = p.str();
  }
  if (dims.lo.z > 0 || dims.hi.z < t.z_min + 1 || dims.extent().x < 4 || dims.extent().y < 4)
    throw Error("cannot place a valid route in the given dimensions");

  std::mt19937_64 rng(seed);
  auto random_xy = [&] {
    return GridVec{uniform_int(rng, dims.lo.x, dims.hi.x),
                   uniform_int(rng, dims.lo.y, dims.hi.y), 0};
  };
  auto random_alt = [&] { return uniform_int(rng, t.z_min, dims.hi.z - 1); };

  bool placed = false;
  for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
    GridVec p1 = random_xy();
    GridVec pn = random_xy();
    if (p1.x == pn.x && p1.y == pn.y) continue;
    std::vector<GridVec> route;
    route.push_back(p1);
    route.push_back({p1.x, p1.y, random_alt()});
    for (int i = 0; i < n_waypoints - 4; ++i) {
      GridVec m = random_xy();
      m.z = random_alt();
      route.push_back(m);
    }
    route.push_back({pn.x, pn.y, random_alt()});
    route.push_back(pn);
    if (validate_route(route, dims, t.z_min).empty()) {
      t.route = std::move(route);
      placed = true;
    }
  }
  if (!placed) throw Error("cannot place a valid route in the given dimensions");

  // Sample the cloud, then carve the canonical staircase tube so the task
  // stays perforated by construction.
  const std::int64_t want =
      static_cast<std::int64_t>(obstacle_density * static_cast<double>(dims.cell_count()));
  std::set<GridVec> cloud;
  Box3Indexer gi(dims);
  for (std::int64_t guard = 0; static_cast<std::int64_t>(cloud.size()) < want &&
                               guard < want * 20 + 100;
       ++guard)
    cloud.insert(gi.decode(rng() % gi.cells()));

  for (int i = 1; i < t.n(); ++i)
    for (const GridVec& c : staircase(t.waypoint(i), t.waypoint(i + 1)))
      Box3::cube(c, t.delta_tube).intersect(dims).for_each_cell(
          [&](GridVec cell) { cloud.erase(cell); });

  t.obstacles.assign(cloud.begin(), cloud.end());
  t.normalize_obstacles();

  tf.params = GameParams::defaults(3, 24);
  tf.params.control_set = axis_boosted_control_set();
  tf.params.pad_v = {2, 2, 3, 3};
  require_valid(tf);  // postcondition: generated tasks always validate
  return tf;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

json vec_json(GridVec v) { return json::array({v.x, v.y, v.z}); }

GridVec vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(std::string(what) + ": expected a [x, y, z] triple");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

json control_set_json(const std::vector<GridVec>& set) {
  if (set == cube_control_set(1)) return "cube1";
  if (set == cube_control_set(2)) return "cube2";
  if (set == axis_boosted_control_set()) return "axis-boosted";
  json arr = json::array();
  for (const GridVec& v : set) arr.push_back(vec_json(v));
  return arr;
}

std::vector<GridVec> control_set_from(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "cube1") return cube_control_set(1);
    if (s == "cube2") return cube_control_set(2);
    if (s == "axis-boosted") return axis_boosted_control_set();
    throw Error("unknown control set name: " + s);
  }
  std::vector<GridVec> set;
  for (const auto& e : j) set.push_back(vec_from(e, "control set entry"));
  return set;
}

json disturbance_set_json(const std::vector<GridVec>& set) {
  if (set == horizontal_disturbance_set(0)) return "none";
  if (set == horizontal_disturbance_set(1)) return "horizontal1";
  if (set == horizontal_disturbance_set(2)) return "horizontal2";
  json arr = json::array();
  for (const GridVec& v : set) arr.push_back(vec_json(v));
  return arr;
}

std::vector<GridVec> disturbance_set_from(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "none") return horizontal_disturbance_set(0);
    if (s == "horizontal1") return horizontal_disturbance_set(1);
    if (s == "horizontal2") return horizontal_disturbance_set(2);
    throw Error("unknown disturbance set name: " + s);
  }
  std::vector<GridVec> set;
  for (const auto& e : j) set.push_back(vec_from(e, "disturbance set entry"));
  return set;
}

}  // namespace

std::string to_json(const TaskFile& tf) {
  const Task& t = tf.task;
  json j;
  j["schema"] = 1;
  if (!t.name.empty()) j["name"] = t.name;
  if (!t.provenance.empty()) j["provenance"] = t.provenance;
  j["grid"] = {{"min", vec_json(t.grid.lo)}, {"max", vec_json(t.grid.hi)}};
  j["z_min"] = t.z_min;
  j["delta_safe"] = t.delta_safe;
  j["delta_tube"] = t.delta_tube;
  json route = json::array();
  for (const GridVec& w : t.route) route.push_back(vec_json(w));
  j["route"] = std::move(route);
  json cells = json::array();
  for (const GridVec& o : t.obstacles) cells.push_back(vec_json(o));
  j["obstacles"] = {{"cells", std::move(cells)}};

  const GameParams& p = tf.params;
  json pj;
  pj["v_max"] = p.v_max;
  pj["horizon"] = p.horizon;
  pj["pad_p"] = p.pad_p;
  pj["pad_v"] = p.pad_v;
  pj["control_set"] = control_set_json(p.control_set);
  pj["disturbance_set"] = disturbance_set_json(p.disturbance_set);
  pj["scope_extension"] = p.scope_extension;
  pj["temporal_extension"] = p.temporal_extension;
  pj["extension_retries"] = p.extension_retries;
  const GameParams ref;
  if (p.p_cost != ref.p_cost) pj["p_cost"] = p.p_cost;
  if (p.q_cost != ref.q_cost) pj["q_cost"] = p.q_cost;
  if (p.r_cost != ref.r_cost) pj["r_cost"] = p.r_cost;
  j["params"] = std::move(pj);
  return j.dump(2) + "\n";
}

TaskFile task_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("task file parse error: ") + e.what());
  }
  try {
    TaskFile tf;
    Task& t = tf.task;
    if (j.value("schema", 0) != 1)
      throw Error("unsupported or missing schema version (expected 1)");
    t.name = j.value("name", std::string());
    t.provenance = j.value("provenance", std::string());
    t.grid.lo = vec_from(j.at("grid").at("min"), "grid.min");
    t.grid.hi = vec_from(j.at("grid").at("max"), "grid.max");
    t.z_min = j.value("z_min", 3);
    t.delta_safe = j.value("delta_safe", 1.5);
    t.delta_tube = j.value("delta_tube", 1);
    for (const auto& e : j.at("route")) t.route.push_back(vec_from(e, "route entry"));
    if (j.contains("obstacles")) {
      const json& obs = j.at("obstacles");
      if (obs.contains("cells"))
        for (const auto& e : obs.at("cells"))
          t.obstacles.push_back(vec_from(e, "obstacle cell"));
      if (obs.contains("boxes"))
        for (const auto& b : obs.at("boxes")) {
          Box3 box{vec_from(b.at("min"), "obstacle box min"),
                   vec_from(b.at("max"), "obstacle box max")};
          box.for_each_cell([&](GridVec c) { t.obstacles.push_back(c); });
        }
    }
    t.normalize_obstacles();

    GameParams& p = tf.params;
    if (j.contains("params")) {
      const json& pj = j.at("params");
      p.v_max = pj.value("v_max", p.v_max);
      p.horizon = pj.value("horizon", p.horizon);
      p = GameParams::defaults(p.v_max, p.horizon);
      if (pj.contains("pad_p")) p.pad_p = pj.at("pad_p").get<std::array<int, 4>>();
      if (pj.contains("pad_v")) p.pad_v = pj.at("pad_v").get<std::array<int, 4>>();
      if (pj.contains("control_set")) p.control_set = control_set_from(pj.at("control_set"));
      if (pj.contains("disturbance_set"))
        p.disturbance_set = disturbance_set_from(pj.at("disturbance_set"));
      p.scope_extension = pj.value("scope_extension", p.scope_extension);
      p.temporal_extension = pj.value("temporal_extension", p.temporal_extension);
      p.extension_retries = pj.value("extension_retries", p.extension_retries);
      if (pj.contains("p_cost")) p.p_cost = pj.at("p_cost").get<Mat6>();
      if (pj.contains("q_cost")) p.q_cost = pj.at("q_cost").get<Mat3>();
      if (pj.contains("r_cost")) p.r_cost = pj.at("r_cost").get<Mat3>();
    }
    return tf;
  } catch (const json::exception& e) {
    throw Error(std::string("task file field error: ") + e.what());
  }
}

TaskFile load_task(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open task file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  TaskFile tf = task_from_json(buf.str());
  require_valid(tf);
  return tf;
}

void save_task(const TaskFile& tf, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << to_json(tf);
  if (!os) throw Error("write to " + path + " failed");
}

}  // namespace windward
