#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "vecmap/core.hpp"

namespace vecmap {

/// Half the sum of both directed mean nearest-neighbour distances.
double chamfer_distance(std::span<const Vec2> a, std::span<const Vec2> b);

struct ScoredFlag {
  double score = 0.0;
  bool tp = false;
};

/// Greedy detection matching on a precomputed pred x gt CD table. Predictions
/// are visited by descending score (ties by index); each takes the unmatched
/// GT with the smallest CD and is a TP iff that CD <= threshold. Output is in
/// visiting order.
std::vector<ScoredFlag> match_for_eval(const Matrix& cd, std::span<const double> scores, double threshold);

struct ScoredPolyline {
  std::vector<Vec2> points;
  double score = 1.0;
};

std::vector<ScoredFlag> match_for_eval(std::span<const ScoredPolyline> preds,
                                       std::span<const std::vector<Vec2>> gts, double threshold);

/// All-point interpolated average precision. n_gt == 0 yields 0 and is
/// counted in diagnostics.
double ap_single(std::span<const ScoredFlag> flags, int n_gt, Diagnostics* diag = nullptr);

/// Parts of the polyline inside the axis-aligned box [-hx,hx] x [-hy,hy].
/// An instance entirely inside is returned unchanged; otherwise the clipped
/// pieces are open polylines.
std::vector<PolyInstance> clip_to_range(const PolyInstance& inst, double half_x, double half_y);

struct EvalCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct EvalReport {
  std::vector<double> thresholds;
  std::array<std::vector<double>, kNumCategories> ap;          // [category][threshold]
  std::array<std::vector<EvalCounts>, kNumCategories> counts;  // [category][threshold]
  std::array<int, kNumCategories> n_gt{};
  std::array<int, kNumCategories> n_pred{};
  std::array<double, kNumCategories> category_ap{};
  double map = 0.0;
  int frames = 0;
  /// Predictions from all frames are ranked together per (category, threshold).
  std::string pooling = "pooled-over-frames";
  Diagnostics diagnostics;
};

EvalReport evaluate(std::span<const LocalVectorMap> preds, std::span<const LocalVectorMap> gts,
                    const EvalConfig& cfg = {});

}  // namespace vecmap
