#include "vecmap/pipeline.hpp"

#include <iomanip>
#include <sstream>

#include "vecmap/synth.hpp"
#include "vecmap/temporal.hpp"

namespace vecmap {

namespace {

std::vector<InstanceEmbedding> scored_embeddings(const LocalVectorMap& map, const LossRunConfig& cfg,
                                                 std::span<const double> scores) {
  auto emb = generate_embeddings(map, cfg.embed_dim, cfg.embed_separation, cfg.embed_sigma, cfg.seed);
  for (std::size_t i = 0; i < emb.size(); ++i) emb[i].score = scores[i];
  return emb;
}

LocalVectorMap expressed_in(const LocalVectorMap& map, const Pose2& frame_pose) {
  LocalVectorMap out = map;
  const Pose2 rel = relative_pose(frame_pose, map.ego_pose);
  for (PolyInstance& inst : out.instances) inst.points = transform_points(rel, inst.points);
  return out;
}

}  // namespace

LossReport compute_losses(std::span<const LocalVectorMap> preds, std::span<const LocalVectorMap> gts,
                          const LossRunConfig& cfg) {
  cfg.weights.validate();
  if (preds.size() != gts.size()) throw InvalidInput("compute_losses: frame counts differ");
  for (std::size_t t = 0; t < preds.size(); ++t) {
    if (preds[t].frame_id != gts[t].frame_id) throw InvalidInput("compute_losses: frame ids are not aligned");
  }

  LossReport report;
  std::vector<MatchResult> matches;
  std::vector<std::vector<double>> scores;
  std::vector<GridMap> rasters;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    matches.push_back(match_instances(preds[t].instances, gts[t].instances, cfg.match_points, cfg.match));
    scores.push_back(instance_scores(preds[t].instances, gts[t].instances, matches.back(), cfg.contrastive.score_tau));
    rasters.push_back(rasterize_map(preds[t], cfg.raster));
  }

  for (std::size_t t = 0; t < preds.size(); ++t) {
    const LocalVectorMap& pred = preds[t];
    const MatchResult& match = matches[t];
    FrameLosses fl;
    fl.frame_id = pred.frame_id;
    fl.matched = static_cast<int>(match.pairs.size());

    const DetectionLosses det = detection_losses(pred.instances, gts[t].instances, match, cfg.focal, &report.diagnostics);
    fl.parts.cls = det.cls;
    fl.parts.pts = det.pts;
    fl.parts.dirs = det.dirs;
    fl.pts_mean = det.pts_mean;

    const auto current = scored_embeddings(pred, cfg, scores[t]);
    if (t > 0) {
      const auto history = scored_embeddings(expressed_in(preds[t - 1], pred.ego_pose), cfg, scores[t - 1]);
      const auto triplets = mine_triplets(current, history, cfg.contrastive);
      fl.parts.cst = contrastive_loss(current, history, triplets, cfg.contrastive.mean_reduction);
    }

    std::vector<AlignedGrid> aligned;
    for (int i = 1; i <= cfg.temporal_window && static_cast<int>(t) - i >= 0; ++i) {
      const std::size_t past = t - static_cast<std::size_t>(i);
      aligned.push_back(align_grid(rasters[past], preds[past].ego_pose, pred.ego_pose));
    }
    if (!aligned.empty()) fl.parts.ol = mo_loss(rasters[t], aligned, &report.diagnostics);

    std::vector<EmbeddingGroup> groups;
    for (const MatchedPair& mp : match.pairs) {
      const auto ordered = apply_ordering(match.gt_points[mp.gt], mp.ordering);
      const auto& pts = match.pred_points[mp.pred];
      EmbeddingGroup g;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        std::vector<double> f = current[mp.pred].feature;
        f[0] += pts[j].x - ordered[j].x;
        f[1] += pts[j].y - ordered[j].y;
        g.push_back(std::move(f));
      }
      groups.push_back(std::move(g));
    }
    const DiscriminativeLoss disc = instance_map_loss(groups, cfg.discriminative);
    fl.parts.var = disc.var;
    fl.parts.dist = disc.dist;

    fl.total = combine_losses(fl.parts, cfg.weights);
    report.frames.push_back(fl);
  }

  if (!report.frames.empty()) {
    const double n = static_cast<double>(report.frames.size());
    for (const FrameLosses& fl : report.frames) {
      report.mean.cls += fl.parts.cls / n;
      report.mean.pts += fl.parts.pts / n;
      report.mean.dirs += fl.parts.dirs / n;
      report.mean.cst += fl.parts.cst / n;
      report.mean.ol += fl.parts.ol / n;
      report.mean.var += fl.parts.var / n;
      report.mean.dist += fl.parts.dist / n;
    }
  }
  report.total = combine_losses(report.mean, cfg.weights);
  return report;
}

}  // namespace vecmap

namespace vecmap {

std::string format_loss_report(const LossReport& report, const LossWeights& w) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "weights: lambda1=" << w.cls << " lambda2=" << w.pts << " lambda3=" << w.dirs << " lambda_a=" << w.cst
     << " lambda_b=" << w.ol << " lambda_c=" << w.var << " lambda_d=" << w.dist << "\n";
  os << std::fixed << std::setprecision(6);
  const auto row = [&os](const std::string& label, const LossParts& p, double total) {
    os << std::left << std::setw(8) << label << std::right;
    for (double v : {p.cls, p.pts, p.dirs, p.cst, p.ol, p.var, p.dist, total}) os << std::setw(13) << v;
    os << "\n";
  };
  os << std::left << std::setw(8) << "frame" << std::right;
  for (const char* h : {"cls", "pts", "dirs", "cst", "ol", "var", "dist", "total"}) os << std::setw(13) << h;
  os << "\n";
  for (const FrameLosses& f : report.frames) row(std::to_string(f.frame_id), f.parts, f.total);
  row("mean", report.mean, report.total);
  os << "total " << report.total << "\n";
  return os.str();
}

}  // namespace vecmap
