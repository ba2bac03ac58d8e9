#include "plot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "windward/errors.hpp"

namespace windward::plot {

namespace {

// One projected view: world (u, w) -> pixel coordinates with w flipped.
struct View {
  int u_lo, u_hi, w_lo, w_hi;
  int scale;
  int margin = 14;

  int width() const { return (u_hi - u_lo + 1) * scale + 2 * margin; }
  int height() const { return (w_hi - w_lo + 1) * scale + 2 * margin; }
  int px(double u) const { return margin + static_cast<int>((u - u_lo) * scale); }
  int py(double w) const { return margin + static_cast<int>((w_hi + 1 - w) * scale); }
  // Cell (u, w) covers [u, u+1) x [w, w+1) in pixels.
  void cell_rect(std::ostream& os, int u, int w, int span, const char* fill) const {
    os << "<rect x=\"" << px(u) << "\" y=\"" << py(w + 1) << "\" width=\"" << span * scale
       << "\" height=\"" << scale << "\" fill=\"" << fill << "\"/>\n";
  }
  void box_rect(std::ostream& os, int u0, int u1, int w0, int w1, const char* style) const {
    os << "<rect x=\"" << px(u0) << "\" y=\"" << py(w1 + 1) << "\" width=\""
       << (u1 - u0 + 1) * scale << "\" height=\"" << (w1 - w0 + 1) * scale << "\" " << style
       << "/>\n";
  }
  // Points at cell centers.
  double cx(double u) const { return px(u) + scale * 0.5; }
  double cy(double w) const { return py(w + 1) + scale * 0.5; }
};

int pick_scale(int eu, int ew) {
  const int target = 900;
  int scale = target / std::max(eu, ew);
  return std::clamp(scale, 2, 24);
}

struct Projector {
  bool side;  // false: (x, y), true: (x, z)
  int u(GridVec p) const { return p.x; }
  int w(GridVec p) const { return side ? p.z : p.y; }
};

void polyline(std::ostream& os, const View& v, const Projector& pr,
              const std::vector<PlayStep>& steps, const char* style) {
  if (steps.empty()) return;
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (const PlayStep& st : steps)
    os << v.cx(pr.u(st.x.p)) << ',' << v.cy(pr.w(st.x.p)) << ' ';
  os << "\"/>\n";
}

std::vector<Box3> goal_boxes(const Task& task, const GameParams& params) {
  std::vector<Box3> boxes;
  const int n = task.n();
  auto add = [&](const HybridState& s) {
    try {
      boxes.push_back(build_modal_game(s, task, params).goal_box);
    } catch (const Error&) {
      // degenerate legs are simply not drawn
    }
  };
  add({Mode::depart, {task.waypoint(1), {0, 0, 0}, 2}});
  for (int wp = 3; wp <= n - 1; ++wp)
    add({Mode::cruise, {task.waypoint(wp - 1), {0, 0, 0}, wp}});
  add({Mode::arrive, {task.waypoint(n - 1), {0, 0, 0}, n}});
  return boxes;
}

void write_view(const Task& task, const GameParams& params, const Projector& pr,
                const std::vector<PlayStep>& primary, bool primary_disturbed,
                const std::vector<PlayStep>* reference, const std::string& path) {
  View v;
  v.u_lo = pr.u(task.grid.lo);
  v.u_hi = pr.u(task.grid.hi);
  v.w_lo = pr.w(task.grid.lo);
  v.w_hi = pr.w(task.grid.hi);
  v.scale = pick_scale(v.u_hi - v.u_lo + 1, v.w_hi - v.w_lo + 1);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.width() << "\" height=\""
     << v.height() << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  v.box_rect(os, v.u_lo, v.u_hi, v.w_lo, v.w_hi,
             "fill=\"none\" stroke=\"#444\" stroke-width=\"1\"");

  // Obstacles: project to the view plane, then merge runs along u.
  {
    std::vector<std::vector<std::uint8_t>> mask(
        static_cast<std::size_t>(v.w_hi - v.w_lo + 1),
        std::vector<std::uint8_t>(static_cast<std::size_t>(v.u_hi - v.u_lo + 1), 0));
    for (const GridVec& o : task.obstacles)
      mask[static_cast<std::size_t>(pr.w(o) - v.w_lo)]
          [static_cast<std::size_t>(pr.u(o) - v.u_lo)] = 1;
    for (int w = v.w_lo; w <= v.w_hi; ++w) {
      const auto& row = mask[static_cast<std::size_t>(w - v.w_lo)];
      for (int u = v.u_lo; u <= v.u_hi;) {
        if (!row[static_cast<std::size_t>(u - v.u_lo)]) {
          ++u;
          continue;
        }
        int run = 0;
        while (u + run <= v.u_hi && row[static_cast<std::size_t>(u + run - v.u_lo)]) ++run;
        v.cell_rect(os, u, w, run, "#9a9a9a");
        u += run;
      }
    }
  }

  // Goal cuboids.
  for (const Box3& b : goal_boxes(task, params)) {
    Box3 c = b.intersect(task.grid);
    if (c.empty()) continue;
    v.box_rect(os, pr.u(c.lo), pr.u(c.hi), pr.w(c.lo), pr.w(c.hi),
               "fill=\"#2ca02c\" fill-opacity=\"0.12\" stroke=\"#2ca02c\" "
               "stroke-opacity=\"0.5\" stroke-width=\"1\"");
  }

  // Route.
  os << "<polyline fill=\"none\" stroke=\"#555\" stroke-width=\"1\" "
        "stroke-dasharray=\"4 3\" points=\"";
  for (const GridVec& wpt : task.route) os << v.cx(pr.u(wpt)) << ',' << v.cy(pr.w(wpt)) << ' ';
  os << "\"/>\n";
  for (int i = 1; i <= task.n(); ++i) {
    const GridVec wpt = task.waypoint(i);
    os << "<circle cx=\"" << v.cx(pr.u(wpt)) << "\" cy=\"" << v.cy(pr.w(wpt))
       << "\" r=\"3\" fill=\"#555\"/>\n";
    os << "<text x=\"" << v.cx(pr.u(wpt)) + 5 << "\" y=\"" << v.cy(pr.w(wpt)) - 4
       << "\" font-size=\"11\" fill=\"#333\">p" << i << "</text>\n";
  }

  // Trajectories: reference in blue, disturbed in red.
  if (reference)
    polyline(os, v, pr, *reference, "stroke=\"#1f77b4\" stroke-width=\"2\"");
  polyline(os, v, pr, primary,
           primary_disturbed ? "stroke=\"#d62728\" stroke-width=\"2\""
                             : "stroke=\"#1f77b4\" stroke-width=\"2\"");
  os << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << os.str();
  if (!out) throw Error("write to " + path + " failed");
}

}  // namespace

void write_scene_svgs(const Task& task, const GameParams& params,
                      const std::vector<PlayStep>& primary, bool primary_disturbed,
                      const std::vector<PlayStep>* reference, const std::string& top_path,
                      const std::string& side_path) {
  write_view(task, params, Projector{false}, primary, primary_disturbed, reference, top_path);
  write_view(task, params, Projector{true}, primary, primary_disturbed, reference, side_path);
}

}  // namespace windward::plot
