#pragma once

#include "vecmap/core.hpp"

namespace vecmap {

struct RasterConfig {
  GridGeometry geometry;
  double conf_threshold = defaults::kRasterThreshold;
  /// Cells whose center lies within stroke_cells * (cell diagonal / 2) of a
  /// segment are set.
  double stroke_cells = 1.0;
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Binary stroke of one polyline (closed instances include the closing edge;
/// polygons are not filled).
GridMap rasterize_instance(const PolyInstance& inst, const GridGeometry& geometry, double stroke_cells = 1.0);

/// Cell-wise max over instances whose score reaches the threshold; instances
/// without a score (ground truth) are always drawn.
GridMap rasterize_map(const LocalVectorMap& map, const RasterConfig& cfg = {});

}  // namespace vecmap
