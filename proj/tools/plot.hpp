#pragma once

#include <string>
#include <vector>

#include "windward/model.hpp"
#include "windward/player.hpp"

namespace windward::plot {

/// Writes the two scene drawings for a play: top-down (x, y) and side
/// (x, z). Shows the grid frame, projected obstacles, the route with
/// numbered waypoints, per-segment goal cuboids, and the trajectories:
/// reference in blue, disturbed in red. Pure function of its inputs, so
/// re-running it on the same CSV data reproduces identical files.
void write_scene_svgs(const Task& task, const GameParams& params,
                      const std::vector<PlayStep>& primary, bool primary_disturbed,
                      const std::vector<PlayStep>* reference, const std::string& top_path,
                      const std::string& side_path);

}  // namespace windward::plot
