#include "trail/astar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "trail/errors.hpp"

namespace trail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QueueEntry {
  double f;
  double g;
  int id;
};

// Lowest f first; ties prefer the entry with the higher g (deeper along its
// path), then the smaller id for determinism.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.id > b.id;
  }
};

}  // namespace

GridPath plan(const CostGrid& grid, Point2 start, Point2 goal, const AStarParams& params) {
  GridIndex s, t;
  if (!grid.world_to_cell(start, &s)) throw OutOfGrid("start lies outside the cost grid");
  if (!grid.world_to_cell(goal, &t)) throw OutOfGrid("goal lies outside the cost grid");

  auto traversable = [&](GridIndex i) { return grid.at(i.row, i.col) < params.lethal_threshold; };
  if (!traversable(s)) throw NoPath("start cell is lethal");
  if (!traversable(t)) throw NoPath("goal cell is lethal");

  const int n = grid.rows * grid.cols;
  auto id_of = [&](GridIndex i) { return i.row * grid.cols + i.col; };
  auto index_of = [&](int id) { return GridIndex{id / grid.cols, id % grid.cols}; };

  double min_cost = kInf;
  for (double c : grid.cost) min_cost = std::min(min_cost, c);
  const double h_rate = min_cost + params.cost_floor;

  const Point2 goal_center = grid.cell_center(t);
  auto heuristic = [&](GridIndex i) { return h_rate * distance(grid.cell_center(i), goal_center); };

  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<char> closed(n, 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;

  const int s_id = id_of(s);
  g[s_id] = 0.0;
  open.push({heuristic(s), 0.0, s_id});

  const int t_id = id_of(t);
  static const int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static const int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

  while (!open.empty()) {
    const QueueEntry e = open.top();
    open.pop();
    if (closed[e.id] || e.g != g[e.id]) continue;  // stale entry
    closed[e.id] = 1;
    if (e.id == t_id) break;

    const GridIndex u = index_of(e.id);
    const double cu = grid.at(u.row, u.col);
    for (int k = 0; k < 8; ++k) {
      const GridIndex v{u.row + kDr[k], u.col + kDc[k]};
      if (!grid.in_grid(v) || !traversable(v)) continue;
      if (kDr[k] != 0 && kDc[k] != 0) {
        // No corner cutting: both straight neighbors must be passable.
        if (!traversable({u.row + kDr[k], u.col}) || !traversable({u.row, u.col + kDc[k]})) {
          continue;
        }
      }
      const int v_id = id_of(v);
      if (closed[v_id]) continue;
      const double step = distance(grid.cell_center(u), grid.cell_center(v));
      const double w = (0.5 * (cu + grid.at(v.row, v.col)) + params.cost_floor) * step;
      const double cand = g[e.id] + w;
      if (cand < g[v_id]) {
        g[v_id] = cand;
        parent[v_id] = e.id;
        open.push({cand + heuristic(v), cand, v_id});
      }
    }
  }

  if (g[t_id] == kInf) throw NoPath("goal unreachable on the cost grid");

  GridPath path;
  path.cost = g[t_id];
  for (int id = t_id; id != -1; id = parent[id]) path.cells.push_back(index_of(id));
  std::reverse(path.cells.begin(), path.cells.end());
  path.points.reserve(path.cells.size());
  for (GridIndex i : path.cells) path.points.push_back(grid.cell_center(i));
  return path;
}

std::vector<Point2> downsample_path(const GridPath& path, int n_points) {
  const int m = static_cast<int>(path.points.size());
  if (m < 1) throw TooFewPoints("cannot downsample an empty path");
  if (n_points < 2) throw TooFewPoints("downsampling needs at least two points");
  if (n_points >= m) return path.points;

  std::vector<double> cum(m, 0.0);
  for (int i = 1; i < m; ++i) {
    cum[i] = cum[i - 1] + distance(path.points[i - 1], path.points[i]);
  }
  const double total = cum[m - 1];

  std::vector<Point2> out;
  out.reserve(n_points);
  out.push_back(path.points.front());
  int prev = 0;
  for (int j = 1; j < n_points - 1; ++j) {
    const double target = total * j / (n_points - 1);
    // Nearest original vertex to the target arc length, kept strictly after
    // the previous pick and leaving room for the remaining picks.
    const int hi = m - 1 - (n_points - 1 - j);
    int i = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (i > 0 && (i >= m || cum[i] - target > target - cum[i - 1])) --i;
    i = std::clamp(i, prev + 1, hi);
    out.push_back(path.points[i]);
    prev = i;
  }
  out.push_back(path.points.back());
  return out;
}

}  // namespace trail
