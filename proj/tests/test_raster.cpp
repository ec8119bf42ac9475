#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "vecmap/raster.hpp"

using namespace vecmap;
using vecmap::testing::Rng;

namespace {

// Per-cell oracle: brute-force distance from every cell center to every edge.
std::vector<double> oracle_raster(const PolyInstance& inst, const GridGeometry& g) {
  const double r = g.resolution * std::sqrt(0.5);
  std::vector<double> out(g.cells(), 0.0);
  std::vector<std::pair<Vec2, Vec2>> edges;
  for (std::size_t i = 1; i < inst.points.size(); ++i) edges.push_back({inst.points[i - 1], inst.points[i]});
  if (inst.closed && inst.points.size() > 2) edges.push_back({inst.points.back(), inst.points.front()});
  for (int row = 0; row < g.height; ++row)
    for (int col = 0; col < g.width; ++col) {
      const double cx = g.x_min + (col + 0.5) * g.resolution;
      const double cy = g.y_min + (row + 0.5) * g.resolution;
      for (const auto& [a, b] : edges) {
        const double dx = b.x - a.x, dy = b.y - a.y;
        double t = ((cx - a.x) * dx + (cy - a.y) * dy) / (dx * dx + dy * dy);
        t = std::min(1.0, std::max(0.0, t));
        if (std::hypot(cx - a.x - t * dx, cy - a.y - t * dy) <= r) {
          out[col + row * g.width] = 1.0;
          break;
        }
      }
    }
  return out;
}

// Cell centers land on multiples of the resolution.
GridGeometry aligned_grid() { return {80, 40, 0.15, -3.075, -3.075}; }

}  // namespace

TEST_CASE("rasterize_instance: 1.5 m segment covers 11 cells in one row") {
  const GridGeometry g = aligned_grid();
  const PolyInstance seg{Category::divider, {{0.0, 0.0}, {1.5, 0.0}}, false, {}, {}};
  const GridMap m = rasterize_instance(seg, g);
  CHECK(m.count_nonzero() == 11);
  const int row0 = static_cast<int>(std::lround((0.0 - g.y_min) / g.resolution - 0.5));
  int run = 0;
  for (int col = 0; col < g.width; ++col) run += m.at(col, row0) == 1.0;
  CHECK(run == 11);
  CHECK(m.values == oracle_raster(seg, g));
}

TEST_CASE("rasterize_instance: out-of-extent and empty inputs") {
  const GridGeometry g = aligned_grid();
  const PolyInstance away{Category::divider, {{100, 100}, {120, 100}}, false, {}, {}};
  CHECK(rasterize_instance(away, g).count_nonzero() == 0);
  LocalVectorMap empty;
  RasterConfig cfg;
  cfg.geometry = g;
  CHECK(rasterize_map(empty, cfg).count_nonzero() == 0);
}

TEST_CASE("rasterize_instance matches the per-cell oracle") {
  Rng rng(501);
  const GridGeometry g{60, 50, 0.2, -6.0, -5.0};
  for (int trial = 0; trial < 40; ++trial) {
    PolyInstance inst{Category::boundary, rng.points(rng.integer(2, 5), 7.0), trial % 3 == 0, {}, {}};
    const GridMap m = rasterize_instance(inst, g);
    CHECK(m.values == oracle_raster(inst, g));
  }
}

TEST_CASE("rasterize_map threshold and union") {
  RasterConfig cfg;
  cfg.geometry = aligned_grid();
  LocalVectorMap low;
  low.instances.push_back({Category::divider, {{0, 0}, {2, 0}}, false, 0.39, {}});
  CHECK(rasterize_map(low, cfg).count_nonzero() == 0);
  low.instances[0].score = 0.4;
  CHECK(rasterize_map(low, cfg).count_nonzero() > 0);

  LocalVectorMap two;
  two.instances.push_back({Category::divider, {{-2, -2}, {2, -2}}, false, {}, {}});
  two.instances.push_back({Category::boundary, {{-2, 2}, {2, 2.5}}, false, {}, {}});
  const GridMap u = rasterize_map(two, cfg);
  const GridMap a = rasterize_instance(two.instances[0], cfg.geometry);
  const GridMap b = rasterize_instance(two.instances[1], cfg.geometry);
  for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(u.values[i] == a.values[i] + b.values[i]);
}

TEST_CASE("rasterize_map on the default grid matches the per-cell oracle") {
  LocalVectorMap gt;
  gt.instances.push_back({Category::divider, {{-30, 1.75}, {0, 1.9}, {30, 1.75}}, false, {}, {}});
  gt.instances.push_back({Category::boundary, {{-30, -7}, {30, -6.5}}, false, {}, {}});
  gt.instances.push_back({Category::ped_crossing, {{8, -5}, {12, -5}, {12, 5}, {8, 5}}, true, {}, {}});
  const RasterConfig cfg;
  const GridMap m = rasterize_map(gt, cfg);
  std::vector<double> expect(cfg.geometry.cells(), 0.0);
  for (const auto& inst : gt.instances) {
    const auto one = oracle_raster(inst, cfg.geometry);
    for (std::size_t i = 0; i < one.size(); ++i) expect[i] = std::max(expect[i], one[i]);
  }
  CHECK(m.values == expect);
  CHECK(m.count_nonzero() > 0);
}

TEST_CASE("rasterization is monotone and binary") {
  Rng rng(503);
  const GridGeometry g{50, 50, 0.2, -5.0, -5.0};
  RasterConfig cfg;
  cfg.geometry = g;
  LocalVectorMap map;
  GridMap prev(g);
  for (int i = 0; i < 8; ++i) {
    map.instances.push_back({Category::divider, rng.points(3, 5.0), false, {}, {}});
    const GridMap cur = rasterize_map(map, cfg);
    for (std::size_t c = 0; c < cur.values.size(); ++c) {
      CHECK((cur.values[c] == 0.0 || cur.values[c] == 1.0));
      CHECK(cur.values[c] >= prev.values[c]);
    }
    prev = cur;
  }
}

TEST_CASE("rasterization is translation-equivariant by whole cells") {
  Rng rng(509);
  const GridGeometry g{80, 80, 0.25, -10.0, -10.0};
  for (int trial = 0; trial < 20; ++trial) {
    PolyInstance inst{Category::divider, rng.points(3, 4.0), false, {}, {}};
    const int dc = rng.integer(-6, 6), dr = rng.integer(-6, 6);
    PolyInstance moved = inst;
    for (auto& p : moved.points) p = p + Vec2{dc * g.resolution, dr * g.resolution};
    const GridMap a = rasterize_instance(inst, g);
    const GridMap b = rasterize_instance(moved, g);
    // Compare interior cells away from the extent edge.
    for (int row = 10; row < g.height - 10; ++row)
      for (int col = 10; col < g.width - 10; ++col) CHECK(b.at(col + dc, row + dr) == a.at(col, row));
  }
}
