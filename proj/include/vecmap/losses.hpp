#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vecmap/core.hpp"
#include "vecmap/matching.hpp"

namespace vecmap {

struct FocalParams {
  double alpha = defaults::kFocalAlpha;
  double gamma = defaults::kFocalGamma;
};

/// -alpha (1 - p_t)^gamma log p_t. `target` empty means background, whose
/// probability is 1 - sum(probs). p_t is clamped at 1e-12 before the log.
double focal_loss(std::span<const double> probs, std::optional<Category> target, const FocalParams& params = {},
                  Diagnostics* diag = nullptr);

struct PointLoss {
  double sum = 0.0;
  double mean = 0.0;  // sum / number of points
};

/// Sum of |dx| + |dy| over already-ordered point pairs.
PointLoss point_loss(std::span<const Vec2> pred, std::span<const Vec2> gt);

/// Mean over edges of 1 - cos(angle between predicted and target edge).
/// Edges of zero length on either side are skipped.
double direction_loss(std::span<const Vec2> pred, std::span<const Vec2> gt, bool closed, Diagnostics* diag = nullptr);

/// Embedding vectors of one instance.
using EmbeddingGroup = std::vector<std::vector<double>>;

struct DiscriminativeParams {
  double delta_v = defaults::kDeltaVar;
  double delta_d = defaults::kDeltaDist;
};

struct DiscriminativeLoss {
  double var = 0.0;
  double dist = 0.0;
};

/// Variance (pull) and distance (push) terms of the discriminative
/// clustering loss; the push term is normalized by C(C-1) over ordered pairs.
DiscriminativeLoss instance_map_loss(std::span<const EmbeddingGroup> instances, const DiscriminativeParams& params = {});

struct LossParts {
  double cls = 0.0;
  double pts = 0.0;
  double dirs = 0.0;
  double cst = 0.0;
  double ol = 0.0;
  double var = 0.0;
  double dist = 0.0;
};

double combine_losses(const LossParts& parts, const LossWeights& w = {});

/// Detection losses for one frame given a matching: focal over every
/// prediction (unmatched ones against background), summed point L1 and
/// per-pair direction loss over matched pairs.
struct DetectionLosses {
  double cls = 0.0;
  double pts = 0.0;
  double pts_mean = 0.0;
  double dirs = 0.0;
};

DetectionLosses detection_losses(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts,
                                 const MatchResult& match, const FocalParams& focal = {}, Diagnostics* diag = nullptr);

}  // namespace vecmap
