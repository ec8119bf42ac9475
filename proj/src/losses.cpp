#include "vecmap/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vecmap {

namespace {

constexpr double kMinProb = 1e-12;

double l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double hinge_sq(double x) { return x > 0.0 ? x * x : 0.0; }

}  // namespace

double focal_loss(std::span<const double> probs, std::optional<Category> target, const FocalParams& params,
                  Diagnostics* diag) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("focal_loss: probability outside [0,1]");
    total += p;
  }
  if (total > 1.0 + 1e-6) throw InvalidInput("focal_loss: probabilities sum above 1");

  double pt = 0.0;
  if (target) {
    const auto idx = static_cast<std::size_t>(index_of(*target));
    if (idx >= probs.size()) throw InvalidInput("focal_loss: target outside probability vector");
    pt = probs[idx];
  } else {
    pt = std::max(0.0, 1.0 - total);
  }
  if (pt >= 1.0) return 0.0;
  if (pt < kMinProb) {
    pt = kMinProb;
    if (diag) ++diag->clamped_log_probs;
  }
  return -params.alpha * std::pow(1.0 - pt, params.gamma) * std::log(pt);
}

PointLoss point_loss(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  if (pred.size() != gt.size()) throw InvalidInput("point_loss: sequence lengths differ");
  PointLoss out;
  for (std::size_t i = 0; i < pred.size(); ++i) out.sum += manhattan(pred[i], gt[i]);
  out.mean = pred.empty() ? 0.0 : out.sum / static_cast<double>(pred.size());
  return out;
}

double direction_loss(std::span<const Vec2> pred, std::span<const Vec2> gt, bool closed, Diagnostics* diag) {
  if (pred.size() != gt.size()) throw InvalidInput("direction_loss: sequence lengths differ");
  if (pred.size() < 2) throw InvalidInput("direction_loss: needs at least 2 points");
  const std::size_t n = pred.size();
  const std::size_t edges = closed ? n : n - 1;
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < edges; ++j) {
    const std::size_t k = (j + 1) % n;
    const Vec2 e = pred[k] - pred[j];
    const Vec2 eg = gt[k] - gt[j];
    const double ne = norm(e);
    const double ng = norm(eg);
    if (ne == 0.0 || ng == 0.0) {
      if (diag) ++diag->skipped_edges;
      continue;
    }
    const double c = std::clamp(dot(e, eg) / (ne * ng), -1.0, 1.0);
    total += 1.0 - c;
    ++used;
  }
  return used == 0 ? 0.0 : total / static_cast<double>(used);
}

DiscriminativeLoss instance_map_loss(std::span<const EmbeddingGroup> instances, const DiscriminativeParams& params) {
  const std::size_t c = instances.size();
  if (c == 0) return {};
  const std::size_t dim = instances.front().empty() ? 0 : instances.front().front().size();

  std::vector<std::vector<double>> means;
  means.reserve(c);
  for (const auto& group : instances) {
    if (group.empty()) throw InvalidInput("instance_map_loss: instance without embeddings");
    std::vector<double> mu(dim, 0.0);
    for (const auto& f : group) {
      if (f.size() != dim) throw InvalidInput("instance_map_loss: embedding dimension mismatch");
      for (std::size_t d = 0; d < dim; ++d) mu[d] += f[d];
    }
    for (double& x : mu) x /= static_cast<double>(group.size());
    means.push_back(std::move(mu));
  }

  DiscriminativeLoss out;
  for (std::size_t i = 0; i < c; ++i) {
    double acc = 0.0;
    for (const auto& f : instances[i]) acc += hinge_sq(l2(means[i], f) - params.delta_v);
    out.var += acc / static_cast<double>(instances[i].size());
  }
  out.var /= static_cast<double>(c);

  if (c > 1) {
    double acc = 0.0;
    for (std::size_t a = 0; a < c; ++a)
      for (std::size_t b = 0; b < c; ++b)
        if (a != b) acc += hinge_sq(2.0 * params.delta_d - l2(means[a], means[b]));
    out.dist = acc / static_cast<double>(c * (c - 1));
  }
  return out;
}

double combine_losses(const LossParts& parts, const LossWeights& w) {
  w.validate();
  for (double v : {parts.cls, parts.pts, parts.dirs, parts.cst, parts.ol, parts.var, parts.dist}) {
    if (!std::isfinite(v)) throw InvalidInput("combine_losses: non-finite loss term");
  }
  return w.cls * parts.cls + w.pts * parts.pts + w.dirs * parts.dirs + w.cst * parts.cst + w.ol * parts.ol +
         w.var * parts.var + w.dist * parts.dist;
}

DetectionLosses detection_losses(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts,
                                 const MatchResult& match, const FocalParams& focal, Diagnostics* diag) {
  DetectionLosses out;
  std::size_t n_points = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ClassProbs probs{};
    if (preds[i].class_probs) {
      probs = *preds[i].class_probs;
    } else {
      probs[index_of(preds[i].category)] = preds[i].score.value_or(1.0);
    }
    const long pair = match.pair_of_pred(i);
    std::optional<Category> target;
    if (pair >= 0) target = gts[match.pairs[static_cast<std::size_t>(pair)].gt].category;
    out.cls += focal_loss(probs, target, focal, diag);
  }
  for (const MatchedPair& mp : match.pairs) {
    const auto& p = match.pred_points[mp.pred];
    const auto ordered = apply_ordering(match.gt_points[mp.gt], mp.ordering);
    out.pts += point_loss(p, ordered).sum;
    out.dirs += direction_loss(p, ordered, gts[mp.gt].closed, diag);
    n_points += p.size();
  }
  out.pts_mean = n_points == 0 ? 0.0 : out.pts / static_cast<double>(n_points);
  return out;
}

}  // namespace vecmap
