#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vecmap/core.hpp"

namespace vecmap {

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Minimum-cost one-to-one assignment of min(rows, cols) pairs (Hungarian
/// method with dual potentials, O(n^2 m)). Pairs are sorted by row.
Assignment solve_assignment(const Matrix& cost);

double assignment_cost(const Matrix& cost, const Assignment& pairs);

/// How a ground-truth point sequence is re-indexed to line up with a
/// prediction. The reordered sequence is r[(j + shift) % N] where r is the
/// ground truth, reversed first when `reversed` is set. Open polylines only
/// admit shift 0.
struct PointOrdering {
  bool reversed = false;
  int shift = 0;

  friend bool operator==(const PointOrdering&, const PointOrdering&) = default;
};

struct PointMatch {
  PointOrdering ordering;
  double cost = 0.0;
};

std::vector<Vec2> apply_ordering(std::span<const Vec2> gt, const PointOrdering& ordering);

/// Minimum total Manhattan distance over the admissible orderings. Ties go to
/// forward before reversed, then to the smaller shift.
PointMatch match_points(std::span<const Vec2> pred, std::span<const Vec2> gt, bool closed);

struct MatchCostConfig {
  double w_cls = defaults::kMatchClsWeight;
  double w_pts = defaults::kMatchPtsWeight;
};

/// w_cls * (1 - p[gt.category]) + w_pts * point cost / N. Both instances must
/// already carry the same number of points; `pred.class_probs` is required.
double instance_cost(const PolyInstance& pred, const PolyInstance& gt, const MatchCostConfig& cfg = {});

struct MatchedPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  PointOrdering ordering;
  double point_cost = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  double total_cost = 0.0;
  /// Inputs resampled to the matching density.
  std::vector<std::vector<Vec2>> pred_points;
  std::vector<std::vector<Vec2>> gt_points;

  /// Index into `pairs` for prediction `p`, or -1 when unmatched.
  long pair_of_pred(std::size_t p) const;
};

/// Resamples every instance to `n_points`, solves the instance assignment on
/// instance_cost, then resolves point ordering for each matched pair.
/// Predictions without class probabilities are treated as one-hot on their
/// category.
MatchResult match_instances(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts,
                            int n_points = defaults::kMatchPoints, const MatchCostConfig& cfg = {});

}  // namespace vecmap
