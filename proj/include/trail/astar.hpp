#pragma once

#include <vector>

#include "trail/costmap.hpp"
#include "trail/geometry.hpp"

namespace trail {

struct AStarParams {
  double cost_floor = 0.05;        // per-meter cost added everywhere, keeps edges > 0
  double lethal_threshold = 0.95;  // cells at or above this are untraversable
};

struct GridPath {
  std::vector<GridIndex> cells;
  std::vector<Point2> points;  // cell centers
  double cost = 0.0;           // accumulated edge cost
};

// 8-connected A* over the cost grid. An edge u->v costs
//   (mean(cost_u, cost_v) + cost_floor) * ||x_u - x_v||
// and the heuristic is (min cell cost + cost_floor) * euclidean distance to
// the goal, which never overestimates. Diagonal moves are allowed only when
// both adjacent straight cells are traversable.
GridPath plan(const CostGrid& grid, Point2 start, Point2 goal, const AStarParams& params = {});

// Keeps the endpoints and picks interior vertices closest to uniform
// arc-length targets along the path, preserving order. Asking for at least as
// many points as the path has returns the path unchanged.
std::vector<Point2> downsample_path(const GridPath& path, int n_points);

}  // namespace trail
