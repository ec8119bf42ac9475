#include "vecmap/temporal.hpp"

#include <algorithm>
#include <cmath>

namespace vecmap {

namespace {

constexpr double kSnap = 1e-9;

double snap(double u) {
  const double r = std::round(u);
  return std::abs(u - r) < kSnap ? r : u;
}

void check_history(const GridMap& current, std::span<const AlignedGrid> history) {
  if (history.empty()) throw InvalidInput("mo_loss: history must hold at least one frame");
  for (const AlignedGrid& h : history) {
    if (!(h.geometry == current.geometry) || h.values.size() != current.values.size() ||
        h.valid.size() != current.values.size()) {
      throw InvalidInput("mo_loss: aligned grid geometry differs from current grid");
    }
  }
}

}  // namespace

std::size_t AlignedGrid::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

AlignedGrid align_grid(const GridMap& past, const Pose2& past_pose, const Pose2& cur_pose) {
  return align_grid(past, past_pose, cur_pose, past.geometry);
}

AlignedGrid align_grid(const GridMap& past, const Pose2& past_pose, const Pose2& cur_pose,
                       const GridGeometry& current_geometry) {
  const GridGeometry& g = past.geometry;
  if (!(current_geometry == g)) throw InvalidInput("align_grid: grid geometry mismatch");
  if (past.values.size() != g.cells()) throw InvalidInput("align_grid: value count does not match geometry");

  AlignedGrid out{g, std::vector<double>(g.cells(), 0.0), std::vector<std::uint8_t>(g.cells(), 0)};
  const Pose2 to_past = relative_pose(past_pose, cur_pose);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const Vec2 q = to_past.apply(g.cell_center(col, row));
      if (!g.contains(q)) continue;
      const double u = snap((q.x - g.x_min) / g.resolution - 0.5);
      const double v = snap((q.y - g.y_min) / g.resolution - 0.5);
      const double fu = std::floor(u);
      const double fv = std::floor(v);
      const double wu = u - fu;
      const double wv = v - fv;
      const int c0 = std::clamp(static_cast<int>(fu), 0, g.width - 1);
      const int c1 = std::clamp(static_cast<int>(fu) + 1, 0, g.width - 1);
      const int r0 = std::clamp(static_cast<int>(fv), 0, g.height - 1);
      const int r1 = std::clamp(static_cast<int>(fv) + 1, 0, g.height - 1);
      double val = (1.0 - wu) * (1.0 - wv) * past.at(c0, r0);
      if (wu != 0.0) val += wu * (1.0 - wv) * past.at(c1, r0);
      if (wv != 0.0) val += (1.0 - wu) * wv * past.at(c0, r1);
      if (wu != 0.0 && wv != 0.0) val += wu * wv * past.at(c1, r1);
      const std::size_t idx = col + static_cast<std::size_t>(row) * g.width;
      out.values[idx] = val;
      out.valid[idx] = 1;
    }
  }
  return out;
}

double mo_loss(const GridMap& current, std::span<const AlignedGrid> history, Diagnostics* diag) {
  check_history(current, history);
  double total = 0.0;
  for (const AlignedGrid& h : history) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < current.values.size(); ++i) {
      if (!h.valid[i]) continue;
      acc += std::abs(current.values[i] - h.values[i]);
      ++n;
    }
    if (n == 0) {
      if (diag) ++diag->empty_masks;
      continue;
    }
    total += acc / static_cast<double>(n);
  }
  return total;
}

std::vector<double> mo_loss_grad(const GridMap& current, std::span<const AlignedGrid> history, Diagnostics* diag) {
  check_history(current, history);
  std::vector<double> grad(current.values.size(), 0.0);
  for (const AlignedGrid& h : history) {
    const std::size_t n = h.valid_count();
    if (n == 0) {
      if (diag) ++diag->empty_masks;
      continue;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!h.valid[i]) continue;
      const double d = current.values[i] - h.values[i];
      if (d > 0.0) grad[i] += inv;
      else if (d < 0.0) grad[i] -= inv;
    }
  }
  return grad;
}

GridMap merge_grids(std::span<const PosedGrid> frames, const Pose2& target_pose) {
  if (frames.empty()) throw InvalidInput("merge_grids: no frames");
  GridMap out(frames.front().grid.geometry);
  for (const PosedGrid& f : frames) {
    const AlignedGrid a = align_grid(f.grid, f.pose, target_pose, out.geometry);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      if (a.valid[i]) out.values[i] += a.values[i];
    }
  }
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::vector<std::uint8_t> common_valid_mask(std::span<const PosedGrid> frames, const Pose2& target_pose) {
  if (frames.empty()) return {};
  std::vector<std::uint8_t> mask(frames.front().grid.geometry.cells(), 1);
  for (const PosedGrid& f : frames) {
    const AlignedGrid a = align_grid(f.grid, f.pose, target_pose, frames.front().grid.geometry);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] && a.valid[i];
  }
  return mask;
}

}  // namespace vecmap
