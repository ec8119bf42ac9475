#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vecmap/contrastive.hpp"
#include "vecmap/core.hpp"
#include "vecmap/losses.hpp"
#include "vecmap/matching.hpp"
#include "vecmap/raster.hpp"

namespace vecmap {

/// Everything needed to evaluate the full training objective on map files.
/// Instance embeddings are not part of the map format, so they are drawn
/// from generate_embeddings with `seed`.
struct LossRunConfig {
  LossWeights weights;
  FocalParams focal;
  MatchCostConfig match;
  int match_points = defaults::kMatchPoints;
  RasterConfig raster;
  int temporal_window = defaults::kTemporalWindow;
  ContrastiveConfig contrastive;
  DiscriminativeParams discriminative;
  int embed_dim = 16;
  double embed_separation = 2.0;
  double embed_sigma = 0.5;
  std::uint64_t seed = 0;
};

struct FrameLosses {
  std::int64_t frame_id = 0;
  LossParts parts;
  double pts_mean = 0.0;
  double total = 0.0;
  int matched = 0;
};

struct LossReport {
  std::vector<FrameLosses> frames;
  LossParts mean;
  double total = 0.0;
  Diagnostics diagnostics;
};

/// Per frame: instance + point matching, focal / point / direction losses,
/// contrastive loss against the previous prediction frame, occupancy loss
/// against up to `temporal_window` earlier prediction frames, and the
/// discriminative loss over per-point embeddings (instance embedding plus
/// the point's residual in the first two dimensions). Terms are averaged
/// over frames and combined with `weights`.
LossReport compute_losses(std::span<const LocalVectorMap> preds, std::span<const LocalVectorMap> gts,
                          const LossRunConfig& cfg = {});

}  // namespace vecmap

namespace vecmap {

/// Weight echo, per-frame terms and the weighted total as a fixed-format table.
std::string format_loss_report(const LossReport& report, const LossWeights& weights);

}  // namespace vecmap
