#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vecmap/core.hpp"
#include "vecmap/matching.hpp"

namespace vecmap {

struct ContrastiveConfig {
  int max_anchors_per_label = defaults::kMaxAnchorsPerLabel;
  int negatives_per_label = defaults::kNegativesPerLabel;
  double positive_radius = defaults::kPositiveRadius;
  double score_tau = defaults::kScoreTau;
  /// Divide the loss by the number of contributing anchors.
  bool mean_reduction = false;
};

/// p[gt] * max(0, 1 - mean_l1 / tau).
double instance_score(double p_gt, double mean_point_l1, double tau = defaults::kScoreTau);

/// Score of every prediction under a matching; unmatched predictions score 0.
std::vector<double> instance_scores(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts,
                                    const MatchResult& match, double tau = defaults::kScoreTau);

/// Indices of the highest-scoring embeddings of each category, at most
/// `max_per_label` per category, grouped in category order.
std::vector<std::size_t> select_anchors(std::span<const InstanceEmbedding> current, int max_per_label);

/// Same-category history entry with the nearest box center, if within r_max.
std::optional<std::size_t> find_positive(const InstanceEmbedding& anchor, std::span<const InstanceEmbedding> history,
                                         double r_max = defaults::kPositiveRadius);

/// Top `k_per_label` by score from every category other than the anchor's.
std::vector<std::size_t> find_negatives(const InstanceEmbedding& anchor, std::span<const InstanceEmbedding> current,
                                        int k_per_label = defaults::kNegativesPerLabel);

/// Anchor and negatives index the current frame; the positive indexes history.
struct ContrastiveTriplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

/// Anchors lacking a positive are dropped.
std::vector<ContrastiveTriplet> mine_triplets(std::span<const InstanceEmbedding> current,
                                              std::span<const InstanceEmbedding> history,
                                              const ContrastiveConfig& cfg = {});

/// log(1 + sum over anchors, negatives of exp(v.k- - v.k+)), evaluated in
/// log-sum-exp form.
double contrastive_loss(std::span<const InstanceEmbedding> current, std::span<const InstanceEmbedding> history,
                        std::span<const ContrastiveTriplet> triplets, bool mean_reduction = false);

struct ContrastiveGrad {
  double loss = 0.0;
  std::vector<std::vector<double>> d_current;  // same shape as current features
  std::vector<std::vector<double>> d_history;
};

ContrastiveGrad contrastive_loss_grad(std::span<const InstanceEmbedding> current,
                                      std::span<const InstanceEmbedding> history,
                                      std::span<const ContrastiveTriplet> triplets, bool mean_reduction = false);

}  // namespace vecmap
