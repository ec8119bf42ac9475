#include "vecmap/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vecmap {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("contrastive: embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Indices of `items` in category `cat`, by descending score then index.
std::vector<std::size_t> ranked_in_category(std::span<const InstanceEmbedding> items, Category cat) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].category == cat) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return items[a].score > items[b].score; });
  return idx;
}

void check_triplets(std::span<const InstanceEmbedding> current, std::span<const InstanceEmbedding> history,
                    std::span<const ContrastiveTriplet> triplets) {
  for (const auto& t : triplets) {
    if (t.anchor >= current.size() || t.positive >= history.size()) {
      throw InvalidInput("contrastive: triplet index out of range");
    }
    for (std::size_t n : t.negatives) {
      if (n >= current.size()) throw InvalidInput("contrastive: negative index out of range");
    }
  }
}

// Logits z = v.k- - v.k+ for every (anchor, negative) in triplet order.
std::vector<double> logits(std::span<const InstanceEmbedding> current, std::span<const InstanceEmbedding> history,
                           std::span<const ContrastiveTriplet> triplets) {
  std::vector<double> z;
  for (const auto& t : triplets) {
    const auto& v = current[t.anchor].feature;
    const double pos = dot(v, history[t.positive].feature);
    for (std::size_t n : t.negatives) z.push_back(dot(v, current[n].feature) - pos);
  }
  return z;
}

// log(1 + sum exp z) and the per-logit weights exp(z_i) / (1 + S).
double softplus_lse(std::span<const double> z, std::vector<double>* weights) {
  double m = 0.0;
  for (double x : z) m = std::max(m, x);
  double denom = std::exp(-m);
  for (double x : z) denom += std::exp(x - m);
  if (weights) {
    weights->resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) (*weights)[i] = std::exp(z[i] - m) / denom;
  }
  return m + std::log(denom);
}

}  // namespace

double instance_score(double p_gt, double mean_point_l1, double tau) {
  if (!(tau > 0.0)) throw InvalidConfig("instance_score: tau must be positive");
  return p_gt * std::max(0.0, 1.0 - mean_point_l1 / tau);
}

std::vector<double> instance_scores(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts,
                                    const MatchResult& match, double tau) {
  std::vector<double> out(preds.size(), 0.0);
  for (const MatchedPair& mp : match.pairs) {
    const PolyInstance& p = preds[mp.pred];
    const Category gc = gts[mp.gt].category;
    double p_gt = 0.0;
    if (p.class_probs) {
      p_gt = (*p.class_probs)[index_of(gc)];
    } else if (p.category == gc) {
      p_gt = p.score.value_or(1.0);
    }
    const double n = static_cast<double>(match.pred_points[mp.pred].size());
    out[mp.pred] = instance_score(p_gt, mp.point_cost / n, tau);
  }
  return out;
}

std::vector<std::size_t> select_anchors(std::span<const InstanceEmbedding> current, int max_per_label) {
  if (max_per_label < 1) throw InvalidConfig("select_anchors: max_per_label must be >= 1");
  std::vector<std::size_t> out;
  for (Category c : kAllCategories) {
    const auto ranked = ranked_in_category(current, c);
    const std::size_t take = std::min(ranked.size(), static_cast<std::size_t>(max_per_label));
    out.insert(out.end(), ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

std::optional<std::size_t> find_positive(const InstanceEmbedding& anchor, std::span<const InstanceEmbedding> history,
                                         double r_max) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].category != anchor.category) continue;
    const double d = distance(history[i].bbox.center, anchor.bbox.center);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best && best_d > r_max) return std::nullopt;
  return best;
}

std::vector<std::size_t> find_negatives(const InstanceEmbedding& anchor, std::span<const InstanceEmbedding> current,
                                        int k_per_label) {
  if (k_per_label < 1) throw InvalidConfig("find_negatives: k_per_label must be >= 1");
  std::vector<std::size_t> out;
  for (Category c : kAllCategories) {
    if (c == anchor.category) continue;
    const auto ranked = ranked_in_category(current, c);
    const std::size_t take = std::min(ranked.size(), static_cast<std::size_t>(k_per_label));
    out.insert(out.end(), ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

std::vector<ContrastiveTriplet> mine_triplets(std::span<const InstanceEmbedding> current,
                                              std::span<const InstanceEmbedding> history,
                                              const ContrastiveConfig& cfg) {
  std::vector<ContrastiveTriplet> out;
  for (std::size_t a : select_anchors(current, cfg.max_anchors_per_label)) {
    const auto pos = find_positive(current[a], history, cfg.positive_radius);
    if (!pos) continue;
    out.push_back({a, *pos, find_negatives(current[a], current, cfg.negatives_per_label)});
  }
  return out;
}

double contrastive_loss(std::span<const InstanceEmbedding> current, std::span<const InstanceEmbedding> history,
                        std::span<const ContrastiveTriplet> triplets, bool mean_reduction) {
  check_triplets(current, history, triplets);
  const double loss = softplus_lse(logits(current, history, triplets), nullptr);
  if (mean_reduction && !triplets.empty()) return loss / static_cast<double>(triplets.size());
  return loss;
}

ContrastiveGrad contrastive_loss_grad(std::span<const InstanceEmbedding> current,
                                      std::span<const InstanceEmbedding> history,
                                      std::span<const ContrastiveTriplet> triplets, bool mean_reduction) {
  check_triplets(current, history, triplets);
  ContrastiveGrad g;
  g.d_current.reserve(current.size());
  for (const auto& e : current) g.d_current.emplace_back(e.feature.size(), 0.0);
  g.d_history.reserve(history.size());
  for (const auto& e : history) g.d_history.emplace_back(e.feature.size(), 0.0);

  std::vector<double> w;
  g.loss = softplus_lse(logits(current, history, triplets), &w);
  const double scale = (mean_reduction && !triplets.empty()) ? 1.0 / static_cast<double>(triplets.size()) : 1.0;
  g.loss *= scale;

  // dz/dv = k- - k+, dz/dk- = v, dz/dk+ = -v.
  std::size_t i = 0;
  for (const auto& t : triplets) {
    const auto& v = current[t.anchor].feature;
    const auto& kp = history[t.positive].feature;
    for (std::size_t n : t.negatives) {
      const auto& kn = current[n].feature;
      const double wi = scale * w[i++];
      for (std::size_t d = 0; d < v.size(); ++d) {
        g.d_current[t.anchor][d] += wi * (kn[d] - kp[d]);
        g.d_current[n][d] += wi * v[d];
        g.d_history[t.positive][d] -= wi * v[d];
      }
    }
  }
  return g;
}

}  // namespace vecmap
