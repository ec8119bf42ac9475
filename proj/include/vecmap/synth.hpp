#pragma once

#include <cstdint>
#include <vector>

#include "vecmap/core.hpp"

namespace vecmap {

/// SplitMix64. The stream is a pure function of (seed, draw count), so
/// sequences reproduce bit-exactly on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer uniform in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard normal via Box-Muller (one draw pair per call).
  double normal();

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);
/// Independent sub-stream seed for (seed, tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

struct SceneConfig {
  std::uint64_t seed = 0;
  int n_frames = 5;
  int dividers_min = 2;
  int dividers_max = 3;
  int crossings_min = 1;
  int crossings_max = 2;
  double lane_width = 3.5;
  double point_spacing = 2.0;
  /// Ego advance per frame (meters) and heading change per frame (radians).
  double ego_step = 2.0;
  double yaw_rate = 0.0;
  double range_x = defaults::kRangeX;
  double range_y = defaults::kRangeY;

  void validate() const;
};

struct PredictionNoise {
  std::uint64_t seed = 0;
  double point_sigma = 0.0;
  double drop_prob = 0.0;
  double fp_rate = 0.0;
  double score_noise = 0.0;

  void validate() const;
};

/// World-frame static layout (dividers, boundaries, crossings) along the
/// trajectory of `cfg`.
std::vector<PolyInstance> generate_layout(const SceneConfig& cfg);

/// World pose of the ego at `frame`.
Pose2 ego_pose_at(const SceneConfig& cfg, int frame);

/// Ground-truth frames: the static layout expressed in each ego frame and
/// clipped to the perception range.
std::vector<LocalVectorMap> generate_scene(const SceneConfig& cfg);

/// Jittered, thinned, scored copy of a ground-truth frame with injected false
/// positives. Deterministic in (noise.seed, gt.frame_id).
LocalVectorMap simulate_predictions(const LocalVectorMap& gt, const PredictionNoise& noise,
                                    double range_x = defaults::kRangeX, double range_y = defaults::kRangeY);

/// Category-conditioned Gaussian clusters. Category means sit on a circle in
/// the first two dimensions with pairwise distance `separation`.
std::vector<InstanceEmbedding> generate_embeddings(const LocalVectorMap& map, int dim, double separation,
                                                   double sigma, std::uint64_t seed);

}  // namespace vecmap
