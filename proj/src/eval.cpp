#include "vecmap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vecmap {

namespace {

double directed_mean(std::span<const Vec2> from, std::span<const Vec2> to) {
  double acc = 0.0;
  for (const Vec2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& q : to) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    acc += std::sqrt(best);
  }
  return acc / static_cast<double>(from.size());
}

std::vector<std::size_t> by_descending_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Liang-Barsky; returns false when the segment misses the box.
bool clip_segment(Vec2& a, Vec2& b, double hx, double hy) {
  const Vec2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x + hx, hx - a.x, a.y + hy, hy - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  const Vec2 a0 = a;
  if (t1 < 1.0) b = a0 + t1 * d;
  if (t0 > 0.0) a = a0 + t0 * d;
  return true;
}

}  // namespace

double chamfer_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw InvalidInput("chamfer_distance: empty point set");
  return 0.5 * (directed_mean(a, b) + directed_mean(b, a));
}

std::vector<ScoredFlag> match_for_eval(const Matrix& cd, std::span<const double> scores, double threshold) {
  if (scores.size() != cd.rows) throw InvalidInput("match_for_eval: score count does not match CD rows");
  std::vector<char> taken(cd.cols, 0);
  std::vector<ScoredFlag> flags;
  flags.reserve(scores.size());
  for (std::size_t i : by_descending_score(scores)) {
    std::size_t best = cd.cols;
    double best_cd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cd.cols; ++j) {
      if (!taken[j] && cd(i, j) < best_cd) {
        best_cd = cd(i, j);
        best = j;
      }
    }
    const bool tp = best < cd.cols && best_cd <= threshold;
    if (tp) taken[best] = 1;
    flags.push_back({scores[i], tp});
  }
  return flags;
}

std::vector<ScoredFlag> match_for_eval(std::span<const ScoredPolyline> preds,
                                       std::span<const std::vector<Vec2>> gts, double threshold) {
  Matrix cd(preds.size(), gts.size());
  std::vector<double> scores(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    scores[i] = preds[i].score;
    for (std::size_t j = 0; j < gts.size(); ++j) cd(i, j) = chamfer_distance(preds[i].points, gts[j]);
  }
  return match_for_eval(cd, scores, threshold);
}

double ap_single(std::span<const ScoredFlag> flags, int n_gt, Diagnostics* diag) {
  if (n_gt < 0) throw InvalidInput("ap_single: negative GT count");
  if (n_gt == 0) {
    if (diag) ++diag->undefined_ap;
    return 0.0;
  }
  std::vector<double> scores(flags.size());
  std::transform(flags.begin(), flags.end(), scores.begin(), [](const ScoredFlag& f) { return f.score; });
  const auto order = by_descending_score(scores);

  std::vector<double> precision;
  std::vector<double> recall;
  int tp = 0;
  int fp = 0;
  for (std::size_t i : order) {
    if (flags[i].tp) ++tp;
    else ++fp;
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / n_gt);
  }
  // Monotone envelope from the right, then area over recall steps.
  for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return std::clamp(ap, 0.0, 1.0);
}

std::vector<PolyInstance> clip_to_range(const PolyInstance& inst, double half_x, double half_y) {
  const auto inside = [&](Vec2 p) { return std::abs(p.x) <= half_x && std::abs(p.y) <= half_y; };
  if (std::all_of(inst.points.begin(), inst.points.end(), inside)) return {inst};

  std::vector<std::vector<Vec2>> pieces;
  const std::size_t n = inst.points.size();
  const std::size_t edges = inst.closed ? n : (n > 0 ? n - 1 : 0);
  for (std::size_t e = 0; e < edges; ++e) {
    Vec2 a = inst.points[e];
    Vec2 b = inst.points[(e + 1) % n];
    if (!clip_segment(a, b, half_x, half_y)) continue;
    if (!pieces.empty() && pieces.back().back() == a) {
      pieces.back().push_back(b);
    } else {
      pieces.push_back({a, b});
    }
  }
  // A closed ring whose start vertex is inside continues across the seam.
  if (inst.closed && pieces.size() > 1 && pieces.back().back() == pieces.front().front()) {
    auto& last = pieces.back();
    last.insert(last.end(), pieces.front().begin() + 1, pieces.front().end());
    pieces.erase(pieces.begin());
  }

  std::vector<PolyInstance> out;
  for (auto& pts : pieces) {
    if (!(arc_length(pts, false) > 0.0)) continue;
    PolyInstance piece = inst;
    piece.points = std::move(pts);
    piece.closed = false;
    out.push_back(std::move(piece));
  }
  return out;
}

EvalReport evaluate(std::span<const LocalVectorMap> preds, std::span<const LocalVectorMap> gts, const EvalConfig& cfg) {
  cfg.validate();
  if (preds.size() != gts.size()) throw InvalidInput("evaluate: prediction and GT frame counts differ");
  for (std::size_t f = 0; f < preds.size(); ++f) {
    if (preds[f].frame_id != gts[f].frame_id) throw InvalidInput("evaluate: frame ids are not aligned");
  }
  const std::size_t n_thr = cfg.cd_thresholds.size();
  const double hx = 0.5 * cfg.range_x;
  const double hy = 0.5 * cfg.range_y;

  EvalReport report;
  report.thresholds = cfg.cd_thresholds;
  report.frames = static_cast<int>(preds.size());
  std::array<std::vector<std::vector<ScoredFlag>>, kNumCategories> flags;
  for (auto& f : flags) f.assign(n_thr, {});

  const auto prepare = [&](const LocalVectorMap& map, Category cat) {
    std::vector<ScoredPolyline> out;
    for (const PolyInstance& inst : map.instances) {
      if (inst.category != cat) continue;
      for (const PolyInstance& piece : clip_to_range(inst, hx, hy)) {
        out.push_back({resample_polyline(piece, cfg.resample_n), piece.score.value_or(1.0)});
      }
    }
    return out;
  };

  for (std::size_t f = 0; f < preds.size(); ++f) {
    for (Category cat : kAllCategories) {
      const int c = index_of(cat);
      const auto p = prepare(preds[f], cat);
      const auto g = prepare(gts[f], cat);
      report.n_gt[c] += static_cast<int>(g.size());
      report.n_pred[c] += static_cast<int>(p.size());

      Matrix cd(p.size(), g.size());
      std::vector<double> scores(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        scores[i] = p[i].score;
        for (std::size_t j = 0; j < g.size(); ++j) cd(i, j) = chamfer_distance(p[i].points, g[j].points);
      }
      for (std::size_t t = 0; t < n_thr; ++t) {
        const auto fl = match_for_eval(cd, scores, cfg.cd_thresholds[t]);
        flags[c][t].insert(flags[c][t].end(), fl.begin(), fl.end());
      }
    }
  }

  double map_sum = 0.0;
  for (Category cat : kAllCategories) {
    const int c = index_of(cat);
    report.ap[c].resize(n_thr);
    report.counts[c].resize(n_thr);
    double acc = 0.0;
    for (std::size_t t = 0; t < n_thr; ++t) {
      const double ap = ap_single(flags[c][t], report.n_gt[c], &report.diagnostics);
      report.ap[c][t] = ap;
      acc += ap;
      EvalCounts& k = report.counts[c][t];
      for (const ScoredFlag& fl : flags[c][t]) (fl.tp ? k.tp : k.fp)++;
      k.fn = report.n_gt[c] - k.tp;
    }
    report.category_ap[c] = acc / static_cast<double>(n_thr);
    map_sum += report.category_ap[c];
  }
  report.map = map_sum / kNumCategories;
  return report;
}

}  // namespace vecmap
