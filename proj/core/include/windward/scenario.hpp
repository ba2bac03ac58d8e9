#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "windward/model.hpp"

namespace windward {

/// Control set over [-2..2]^3 with at most one axis at magnitude 2
/// (81 vectors). The boosted axis gives authority over unit wind while the
/// unit components keep the other axes steerable in the same step, at
/// two-thirds the cost of the full cube.
std::vector<GridVec> axis_boosted_control_set();

/// On-disk bundle: a task plus the game parameters tuned for it.
struct TaskFile {
  Task task;
  GameParams params;

  friend bool operator==(const TaskFile&, const TaskFile&) = default;
};

// ---------------------------------------------------------------------------
// Route validation and perforation
// ---------------------------------------------------------------------------

struct RouteViolation {
  std::string clause;  // short machine-readable name
  std::string detail;
};

/// Checks: n >= 4, waypoints distinct and inside the grid, endpoints on the
/// ground, second and second-to-last waypoints (x,y)-superimposed over the
/// endpoints, all intermediate waypoints at z >= z_min.
std::vector<RouteViolation> validate_route(const std::vector<GridVec>& route, const Box3& grid,
                                           int z_min);
inline bool route_valid(const std::vector<GridVec>& route, const Box3& grid, int z_min) {
  return validate_route(route, grid, z_min).empty();
}

struct PerforationResult {
  bool perforated = false;
  /// Unit-step (26-neighbourhood) tube center path visiting the delta_tube
  /// neighbourhood of every waypoint in order; empty when not perforated.
  std::vector<GridVec> witness;
};

/// Searches for an obstacle-free tube of cube radius delta_tube containing
/// the route: sequential breadth-first search between consecutive waypoint
/// neighbourhoods over tube-clear cells (cells whose whole cube avoids the
/// obstacle cloud).
PerforationResult check_perforation(const Task& task);

/// Validates route and perforation; throws Error listing all violations.
void require_valid(const TaskFile& tf);

// ---------------------------------------------------------------------------
// Fixtures and generation
// ---------------------------------------------------------------------------

std::vector<std::string_view> builtin_scenario_names();

/// Hand-authored scenario fixtures: yard, industrial (200x250, 14 waypoints),
/// streets (400x450, 12 waypoints), random-fixture, mini-yard (desk-scale,
/// used by the acceptance suite). All pass both validators.
TaskFile builtin_scenario(std::string_view name);

/// Seed-deterministic random task: samples a valid route, then obstacle
/// cells at the given density, carving out any cell that would break the
/// perforation tube. density must be in [0, 1).
TaskFile gen_random_scenario(std::uint64_t seed, const Box3& dims, double obstacle_density,
                             int n_waypoints);

// ---------------------------------------------------------------------------
// Persistence (JSON, schema version 1)
// ---------------------------------------------------------------------------

std::string to_json(const TaskFile& tf);
TaskFile task_from_json(const std::string& text);

/// Loads and validates; parse and validation failures throw Error with
/// field/line diagnostics.
TaskFile load_task(const std::string& path);
void save_task(const TaskFile& tf, const std::string& path);

}  // namespace windward
