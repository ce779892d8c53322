#include "trail/costmap.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "trail/errors.hpp"

namespace trail {

bool CostGrid::world_to_cell(Point2 p, GridIndex* out) const {
  const int c = static_cast<int>(std::floor((p.x - origin.x) / resolution));
  const int r = static_cast<int>(std::floor((p.y - origin.y) / resolution));
  GridIndex i{r, c};
  if (!in_grid(i)) return false;
  *out = i;
  return true;
}

CostGrid CostGrid::from_raster_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  for (const char* key : {"origin_x", "origin_y", "resolution", "rows", "cols", "values"}) {
    if (!j.contains(key)) throw ConfigInvalid(std::string("raster JSON missing key: ") + key);
  }
  CostGrid g;
  g.origin = {j["origin_x"].get<double>(), j["origin_y"].get<double>()};
  g.resolution = j["resolution"].get<double>();
  g.rows = j["rows"].get<int>();
  g.cols = j["cols"].get<int>();
  g.cost = j["values"].get<std::vector<double>>();
  if (g.cost.size() != static_cast<std::size_t>(g.rows) * g.cols) {
    throw ShapeMismatch("raster value count does not match rows*cols");
  }
  return g;
}

std::string CostGrid::to_raster_json() const {
  nlohmann::json j;
  j["origin_x"] = origin.x;
  j["origin_y"] = origin.y;
  j["resolution"] = resolution;
  j["rows"] = rows;
  j["cols"] = cols;
  j["values"] = cost;
  return j.dump();
}

namespace {

CostGrid make_grid(const Bounds& region, double resolution) {
  if (resolution <= 0.0) throw ConfigInvalid("grid resolution must be positive");
  CostGrid g;
  g.origin = {region.x_min, region.y_min};
  g.resolution = resolution;
  // Last partial cell is kept; a tiny epsilon avoids an extra cell when the
  // extent is an exact multiple of the resolution.
  g.cols = static_cast<int>(std::ceil(region.width() / resolution - 1e-9));
  g.rows = static_cast<int>(std::ceil(region.height() / resolution - 1e-9));
  if (g.rows < 1 || g.cols < 1) throw EmptyRegion("region smaller than one grid cell");
  g.cost.assign(static_cast<std::size_t>(g.rows) * g.cols, 0.0);
  return g;
}

}  // namespace

CostGrid build_geometric_costmap(const TerrainField& elevation, const Bounds& region,
                                 const GeomCostParams& params) {
  if (!elevation.bounds().contains(region)) {
    throw RegionOutOfBounds("costmap region extends beyond the elevation field");
  }
  if (params.max_slope <= 0.0 || params.max_step <= 0.0) {
    throw ConfigInvalid("slope and step normalizers must be positive");
  }
  CostGrid g = make_grid(region, params.coarse_resolution);

  // One elevation query per cell, reused for slope and the step stencil.
  std::vector<double> elev(g.cost.size());
  std::vector<double> slope(g.cost.size());
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const FieldSample s = elevation.query(g.cell_center({r, c}));
      elev[static_cast<std::size_t>(r) * g.cols + c] = s.value;
      slope[static_cast<std::size_t>(r) * g.cols + c] = norm(s.gradient);
    }
  }
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const double e0 = elev[static_cast<std::size_t>(r) * g.cols + c];
      double step = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const GridIndex n{r + dr, c + dc};
          if (!g.in_grid(n)) continue;
          step = std::max(step,
                          std::abs(elev[static_cast<std::size_t>(n.row) * g.cols + n.col] - e0));
        }
      }
      const double slope_norm =
          std::clamp(slope[static_cast<std::size_t>(r) * g.cols + c] / params.max_slope, 0.0, 1.0);
      const double step_norm = std::clamp(step / params.max_step, 0.0, 1.0);
      g.at(r, c) = slope_norm * step_norm;
    }
  }
  return g;
}

CostGrid blend_costmaps(const CostGrid& a, const CostGrid& b, double weight) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeMismatch("blend requires identically shaped grids");
  }
  if (weight < 0.0 || weight > 1.0) throw ConfigInvalid("blend weight must be in [0, 1]");
  CostGrid out = a;
  for (std::size_t i = 0; i < out.cost.size(); ++i) {
    out.cost[i] = weight * a.cost[i] + (1.0 - weight) * b.cost[i];
  }
  return out;
}

CostGrid rasterize_bumpiness(const TerrainField& bumpiness, const Bounds& region,
                             double resolution) {
  if (!bumpiness.bounds().contains(region)) {
    throw RegionOutOfBounds("raster region extends beyond the bumpiness field");
  }
  CostGrid g = make_grid(region, resolution);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      g.at(r, c) = bumpiness.query(g.cell_center({r, c})).value;
    }
  }
  return g;
}

CostGrid inflate(const CostGrid& grid, double radius) {
  if (radius <= 0.0) return grid;
  CostGrid out = grid;
  const int reach = static_cast<int>(std::floor(radius / grid.resolution));
  const double r2 = (radius / grid.resolution) * (radius / grid.resolution);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      double m = grid.at(r, c);
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc > r2) continue;
          const GridIndex n{r + dr, c + dc};
          if (!grid.in_grid(n)) continue;
          m = std::max(m, grid.at(n.row, n.col));
        }
      }
      out.at(r, c) = m;
    }
  }
  return out;
}

}  // namespace trail
