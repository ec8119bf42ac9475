#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vecmap/core.hpp"

namespace vecmap {

/// A past grid resampled onto the current frame's cells. Cells whose center
/// falls outside the past grid's extent are invalid and excluded from every
/// reduction.
struct AlignedGrid {
  GridGeometry geometry;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const;
};

/// Bilinear resampling of `past` (observed at past_pose) into the frame at
/// cur_pose. Sample positions within 1e-9 cells of a cell center snap to it so
/// whole-cell offsets reproduce values exactly.
AlignedGrid align_grid(const GridMap& past, const Pose2& past_pose, const Pose2& cur_pose);
AlignedGrid align_grid(const GridMap& past, const Pose2& past_pose, const Pose2& cur_pose,
                       const GridGeometry& current_geometry);

/// Sum over history of the mean absolute difference over valid cells.
double mo_loss(const GridMap& current, std::span<const AlignedGrid> history, Diagnostics* diag = nullptr);

/// Subgradient of mo_loss w.r.t. current values: sum_i sign(cur - aligned_i) / |valid_i|
/// on valid cells, with sign(0) = 0.
std::vector<double> mo_loss_grad(const GridMap& current, std::span<const AlignedGrid> history,
                                 Diagnostics* diag = nullptr);

struct PosedGrid {
  GridMap grid;
  Pose2 pose;
};

/// Aligns every frame into target_pose, sums valid samples, clamps to [0,1].
GridMap merge_grids(std::span<const PosedGrid> frames, const Pose2& target_pose);

/// Cells valid in every aligned frame of `frames` w.r.t. target_pose.
std::vector<std::uint8_t> common_valid_mask(std::span<const PosedGrid> frames, const Pose2& target_pose);

}  // namespace vecmap
