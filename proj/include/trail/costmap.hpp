#pragma once

#include <string>
#include <vector>

#include "trail/field.hpp"
#include "trail/geometry.hpp"

namespace trail {

struct GridIndex {
  int row = 0;
  int col = 0;
  bool operator==(const GridIndex&) const = default;
};

// Regular grid of scalar costs in [0, 1]. Row 0 is at origin_y, values are
// stored row-major and refer to cell centers.
struct CostGrid {
  Point2 origin;
  double resolution = 1.0;
  int rows = 0;
  int cols = 0;
  std::vector<double> cost;

  double at(int r, int c) const { return cost[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return cost[static_cast<std::size_t>(r) * cols + c]; }

  Point2 cell_center(GridIndex i) const {
    return {origin.x + (i.col + 0.5) * resolution, origin.y + (i.row + 0.5) * resolution};
  }

  bool in_grid(GridIndex i) const {
    return i.row >= 0 && i.row < rows && i.col >= 0 && i.col < cols;
  }

  // Cell containing a world point; false if the point is off the grid.
  bool world_to_cell(Point2 p, GridIndex* out) const;

  // Same raster JSON schema as GriddedField, so saved grids can be reloaded
  // as interpolated fields.
  static CostGrid from_raster_json(const std::string& json_text);
  std::string to_raster_json() const;
};

struct GeomCostParams {
  double max_slope = 0.3;         // rise/run at which slope risk saturates
  double max_step = 0.2;          // elevation step [m] at which step risk saturates
  double coarse_resolution = 0.25;  // cell size [m]
};

// Geometric traversal risk from an elevation field: normalized slope times
// normalized neighborhood step, both clamped to [0, 1] before the product.
CostGrid build_geometric_costmap(const TerrainField& elevation, const Bounds& region,
                                 const GeomCostParams& params);

// Elementwise weight*a + (1-weight)*b; grids must have identical shape.
CostGrid blend_costmaps(const CostGrid& a, const CostGrid& b, double weight);

// Bumpiness field sampled at cell centers.
CostGrid rasterize_bumpiness(const TerrainField& bumpiness, const Bounds& region,
                             double resolution);

// Grayscale dilation with a disk: each cell takes the max cost over all cells
// whose center lies within `radius`. radius <= 0 returns the input unchanged.
CostGrid inflate(const CostGrid& grid, double radius);

}  // namespace trail
