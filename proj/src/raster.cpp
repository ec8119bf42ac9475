#include "vecmap/raster.hpp"

#include <algorithm>
#include <cmath>

namespace vecmap {

namespace {

void draw_segment(GridMap& grid, Vec2 a, Vec2 b, double radius) {
  const GridGeometry& g = grid.geometry;
  const double lo_x = std::min(a.x, b.x) - radius;
  const double hi_x = std::max(a.x, b.x) + radius;
  const double lo_y = std::min(a.y, b.y) - radius;
  const double hi_y = std::max(a.y, b.y) + radius;
  // Candidate cells: centers inside the padded segment box.
  const int c0 = std::max(0, static_cast<int>(std::floor((lo_x - g.x_min) / g.resolution - 0.5)));
  const int c1 = std::min(g.width - 1, static_cast<int>(std::ceil((hi_x - g.x_min) / g.resolution - 0.5)));
  const int r0 = std::max(0, static_cast<int>(std::floor((lo_y - g.y_min) / g.resolution - 0.5)));
  const int r1 = std::min(g.height - 1, static_cast<int>(std::ceil((hi_y - g.y_min) / g.resolution - 0.5)));
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      if (point_segment_distance(g.cell_center(col, row), a, b) <= radius) grid.at(col, row) = 1.0;
    }
  }
}

void draw_instance(GridMap& grid, const PolyInstance& inst, double stroke_cells) {
  for (const Vec2& p : inst.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("rasterize_instance: non-finite point");
  }
  const double radius = stroke_cells * grid.geometry.resolution * std::sqrt(0.5);
  const auto& pts = inst.points;
  if (pts.size() == 1) draw_segment(grid, pts[0], pts[0], radius);
  for (std::size_t i = 1; i < pts.size(); ++i) draw_segment(grid, pts[i - 1], pts[i], radius);
  if (inst.closed && pts.size() > 2) draw_segment(grid, pts.back(), pts.front(), radius);
}

}  // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

GridMap rasterize_instance(const PolyInstance& inst, const GridGeometry& geometry, double stroke_cells) {
  geometry.validate();
  GridMap grid(geometry);
  draw_instance(grid, inst, stroke_cells);
  return grid;
}

GridMap rasterize_map(const LocalVectorMap& map, const RasterConfig& cfg) {
  cfg.geometry.validate();
  // Strokes only ever write 1, so drawing in place equals the cell-wise max.
  GridMap out(cfg.geometry);
  for (const PolyInstance& inst : map.instances) {
    if (inst.score && *inst.score < cfg.conf_threshold) continue;
    draw_instance(out, inst, cfg.stroke_cells);
  }
  return out;
}

}  // namespace vecmap
