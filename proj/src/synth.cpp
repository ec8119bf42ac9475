#include "vecmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vecmap/eval.hpp"

namespace vecmap {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// Point on a constant-curvature centerline at arc length s, offset laterally.
struct Centerline {
  double curvature = 0.0;

  double heading(double s) const { return curvature * s; }

  Vec2 at(double s, double offset) const {
    Vec2 c;
    if (std::abs(curvature) < 1e-12) {
      c = {s, 0.0};
    } else {
      c = {std::sin(curvature * s) / curvature, (1.0 - std::cos(curvature * s)) / curvature};
    }
    const double h = heading(s);
    return {c.x - std::sin(h) * offset, c.y + std::cos(h) * offset};
  }

  std::vector<Vec2> line(double s0, double s1, double offset, double spacing) const {
    const int n = std::max(2, static_cast<int>(std::ceil((s1 - s0) / spacing)) + 1);
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(at(s0 + (s1 - s0) * i / (n - 1), offset));
    return pts;
  }
};

Centerline centerline_of(const SceneConfig& cfg) {
  return {cfg.ego_step > 0.0 ? cfg.yaw_rate / cfg.ego_step : 0.0};
}

ClassProbs probs_for(Category c, double score) {
  ClassProbs p;
  p.fill((1.0 - score) / kNumCategories);
  p[index_of(c)] = score;
  return p;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return mix64(seed ^ mix64(tag + kGamma)); }

std::uint64_t SplitMix64::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

int SplitMix64::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

double SplitMix64::normal() {
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneConfig::validate() const {
  if (n_frames < 1) throw InvalidConfig("scene: n_frames must be >= 1");
  if (dividers_min < 0 || dividers_max < dividers_min) throw InvalidConfig("scene: bad divider range");
  if (crossings_min < 0 || crossings_max < crossings_min) throw InvalidConfig("scene: bad crossing range");
  if (!(lane_width > 0.0) || !(point_spacing > 0.0)) throw InvalidConfig("scene: lane width and spacing must be positive");
  if (!(ego_step >= 0.0) || !std::isfinite(yaw_rate)) throw InvalidConfig("scene: bad ego motion");
  if (!(range_x > 0.0) || !(range_y > 0.0)) throw InvalidConfig("scene: range must be positive");
  if ((dividers_max + 1) * lane_width >= range_y) throw InvalidConfig("scene: road wider than perception range");
}

void PredictionNoise::validate() const {
  for (double p : {drop_prob, fp_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("prediction noise: probabilities must lie in [0,1]");
  }
  if (!(point_sigma >= 0.0) || !(score_noise >= 0.0)) throw InvalidConfig("prediction noise: sigmas must be >= 0");
}

Pose2 ego_pose_at(const SceneConfig& cfg, int frame) {
  const Centerline cl = centerline_of(cfg);
  const double s = frame * cfg.ego_step;
  const Vec2 p = cl.at(s, 0.0);
  return {p.x, p.y, wrap_angle(cl.heading(s))};
}

std::vector<PolyInstance> generate_layout(const SceneConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(derive_seed(cfg.seed, 0x4C41594FULL));
  const Centerline cl = centerline_of(cfg);
  const double margin = std::hypot(cfg.range_x, cfg.range_y);
  const double s_begin = -margin;
  const double s_end = (cfg.n_frames - 1) * cfg.ego_step + margin;

  std::vector<PolyInstance> layout;
  const int n_div = rng.uniform_int(cfg.dividers_min, cfg.dividers_max);
  const double half_road = 0.5 * (n_div + 1) * cfg.lane_width;
  for (int k = 0; k < n_div; ++k) {
    const double offset = (k - 0.5 * (n_div - 1)) * cfg.lane_width + rng.uniform(-0.3, 0.3);
    const double s0 = s_begin + rng.uniform(0.0, 10.0);
    const double s1 = s_end - rng.uniform(0.0, 10.0);
    layout.push_back({Category::divider, cl.line(s0, s1, offset, cfg.point_spacing), false, {}, {}});
  }
  for (double side : {-1.0, 1.0}) {
    const double offset = side * (half_road + rng.uniform(0.0, 0.5));
    layout.push_back({Category::boundary, cl.line(s_begin, s_end, offset, cfg.point_spacing), false, {}, {}});
  }
  const int n_cross = rng.uniform_int(cfg.crossings_min, cfg.crossings_max);
  const double s_lo = -0.4 * cfg.range_x;
  const double s_hi = (cfg.n_frames - 1) * cfg.ego_step + 0.4 * cfg.range_x;
  for (int k = 0; k < n_cross; ++k) {
    const double s = rng.uniform(s_lo, s_hi);
    const double depth = rng.uniform(3.0, 5.0);
    const double w = half_road - 0.5;
    std::vector<Vec2> ring = {cl.at(s - 0.5 * depth, -w), cl.at(s + 0.5 * depth, -w), cl.at(s + 0.5 * depth, w),
                              cl.at(s - 0.5 * depth, w)};
    layout.push_back({Category::ped_crossing, std::move(ring), true, {}, {}});
  }
  return layout;
}

std::vector<LocalVectorMap> generate_scene(const SceneConfig& cfg) {
  const std::vector<PolyInstance> layout = generate_layout(cfg);
  std::vector<LocalVectorMap> frames;
  frames.reserve(cfg.n_frames);
  for (int t = 0; t < cfg.n_frames; ++t) {
    LocalVectorMap m;
    m.frame_id = t;
    m.timestamp = 0.5 * t;
    m.ego_pose = ego_pose_at(cfg, t);
    const Pose2 world_to_ego = m.ego_pose.inverse();
    for (const PolyInstance& inst : layout) {
      PolyInstance local = inst;
      local.points = transform_points(world_to_ego, inst.points);
      for (PolyInstance& piece : clip_to_range(local, 0.5 * cfg.range_x, 0.5 * cfg.range_y)) {
        m.instances.push_back(std::move(piece));
      }
    }
    frames.push_back(std::move(m));
  }
  return frames;
}

LocalVectorMap simulate_predictions(const LocalVectorMap& gt, const PredictionNoise& noise, double range_x,
                                    double range_y) {
  noise.validate();
  SplitMix64 rng(derive_seed(noise.seed, static_cast<std::uint64_t>(gt.frame_id)));
  LocalVectorMap out;
  out.frame_id = gt.frame_id;
  out.timestamp = gt.timestamp;
  out.ego_pose = gt.ego_pose;

  for (const PolyInstance& inst : gt.instances) {
    // Fixed draw budget per instance keeps streams aligned across noise levels.
    const double u_drop = rng.uniform();
    const double u_fp = rng.uniform();
    const double z_score = rng.normal();
    SplitMix64 jitter(rng.next_u64());
    SplitMix64 fp_rng(rng.next_u64());

    if (u_drop >= noise.drop_prob) {
      PolyInstance p = inst;
      for (Vec2& q : p.points) {
        const double dx = jitter.normal();
        const double dy = jitter.normal();
        q = q + noise.point_sigma * Vec2{dx, dy};
      }
      const double score = std::clamp(1.0 - noise.score_noise * std::abs(z_score), 0.0, 1.0);
      p.score = score;
      p.class_probs = probs_for(p.category, score);
      out.instances.push_back(std::move(p));
    }
    if (u_fp < noise.fp_rate) {
      PolyInstance fp;
      fp.category = kAllCategories[fp_rng.uniform_int(0, kNumCategories - 1)];
      const Vec2 start{fp_rng.uniform(-0.45, 0.45) * range_x, fp_rng.uniform(-0.45, 0.45) * range_y};
      const double heading = fp_rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double length = fp_rng.uniform(4.0, 12.0);
      const int n = 6;
      for (int i = 0; i < n; ++i) {
        const double s = length * i / (n - 1);
        fp.points.push_back({start.x + s * std::cos(heading), start.y + s * std::sin(heading)});
      }
      const double score = fp_rng.uniform(0.1, 0.6);
      fp.score = score;
      fp.class_probs = probs_for(fp.category, score);
      out.instances.push_back(std::move(fp));
    }
  }
  return out;
}

std::vector<InstanceEmbedding> generate_embeddings(const LocalVectorMap& map, int dim, double separation,
                                                   double sigma, std::uint64_t seed) {
  if (dim < 2) throw InvalidConfig("generate_embeddings: dim must be >= 2");
  if (!(sigma >= 0.0) || !(separation >= 0.0)) throw InvalidConfig("generate_embeddings: bad spread");
  SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(map.frame_id)));
  const double radius = separation / std::sqrt(3.0);
  std::vector<InstanceEmbedding> out;
  out.reserve(map.instances.size());
  for (const PolyInstance& inst : map.instances) {
    InstanceEmbedding e;
    e.category = inst.category;
    e.score = inst.score.value_or(1.0);
    e.bbox = bbox_of(inst);
    e.feature.assign(dim, 0.0);
    const double angle = 2.0 * std::numbers::pi * index_of(inst.category) / kNumCategories;
    e.feature[0] = radius * std::cos(angle);
    e.feature[1] = radius * std::sin(angle);
    for (double& x : e.feature) x += sigma * rng.normal();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace vecmap
