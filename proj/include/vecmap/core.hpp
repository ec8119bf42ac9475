#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vecmap/defaults.hpp"

namespace vecmap {

// Error taxonomy shared by every module.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Counters for recoverable numerical events (clamps, skipped edges, empty
/// masks). Operations accept an optional pointer and only ever increment.
struct Diagnostics {
  int clamped_log_probs = 0;
  int skipped_edges = 0;
  int clamped_indices = 0;
  int empty_masks = 0;
  int undefined_ap = 0;

  bool clean() const {
    return clamped_log_probs == 0 && skipped_edges == 0 &&
           clamped_indices == 0 && empty_masks == 0 && undefined_ap == 0;
  }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double dot(Vec2 a, Vec2 b);
double norm(Vec2 a);
double distance(Vec2 a, Vec2 b);
double manhattan(Vec2 a, Vec2 b);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

/// Planar rigid transform: p -> R(yaw) p + (x, y).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  static Pose2 identity() { return {}; }

  Vec2 apply(Vec2 p) const;
  Pose2 inverse() const;
  /// this * other: apply `other` first, then `this`.
  Pose2 compose(const Pose2& other) const;

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

std::vector<Vec2> transform_points(const Pose2& pose, std::span<const Vec2> pts);

/// Transform taking coordinates expressed in frame `b` into frame `a`
/// (both poses given in the same world frame).
Pose2 relative_pose(const Pose2& a, const Pose2& b);

enum class Category : int { divider = 0, ped_crossing = 1, boundary = 2 };
inline constexpr int kNumCategories = 3;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::divider, Category::ped_crossing, Category::boundary};

std::string_view to_string(Category c);
Category category_from_string(std::string_view s);
inline int index_of(Category c) { return static_cast<int>(c); }

struct BBox {
  Vec2 center;
  Vec2 half_extent;
};

using ClassProbs = std::array<double, kNumCategories>;

struct PolyInstance {
  Category category = Category::divider;
  std::vector<Vec2> points;
  bool closed = false;
  std::optional<double> score;
  std::optional<ClassProbs> class_probs;
};

/// Throws InvalidInput unless the instance has >= 2 finite points and a
/// score / class probabilities in [0,1] when present.
void validate_instance(const PolyInstance& inst);

struct LocalVectorMap {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  Pose2 ego_pose;
  std::vector<PolyInstance> instances;
};

/// Arc length including the closing edge for closed instances.
double arc_length(std::span<const Vec2> pts, bool closed);

/// `n` points at equal arc-length spacing. Open polylines keep both
/// endpoints; closed ones start at the first vertex and do not repeat it.
std::vector<Vec2> resample_polyline(const PolyInstance& inst, int n);
std::vector<Vec2> resample_polyline(std::span<const Vec2> pts, bool closed, int n);

BBox bbox_of(std::span<const Vec2> pts);
inline BBox bbox_of(const PolyInstance& inst) { return bbox_of(inst.points); }

/// Raster geometry. Column indexes x, row indexes y; cell (0,0) is anchored
/// at (x_min, y_min). Storage is row-major: index = col + row * width.
struct GridGeometry {
  int width = defaults::kGridWidth;
  int height = defaults::kGridHeight;
  double resolution = defaults::kGridResolution;
  double x_min = -0.5 * defaults::kGridWidth * defaults::kGridResolution;
  double y_min = -0.5 * defaults::kGridHeight * defaults::kGridResolution;

  double x_max() const { return x_min + width * resolution; }
  double y_max() const { return y_min + height * resolution; }
  std::size_t cells() const { return static_cast<std::size_t>(width) * height; }
  Vec2 cell_center(int col, int row) const {
    return {x_min + (col + 0.5) * resolution, y_min + (row + 0.5) * resolution};
  }
  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max() && p.y >= y_min && p.y <= y_max();
  }
  void validate() const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Centered grid with `resolution` spacing spanning width x height cells.
GridGeometry centered_grid(int width, int height, double resolution);

struct GridMap {
  GridGeometry geometry;
  std::vector<double> values;

  GridMap() = default;
  explicit GridMap(const GridGeometry& g) : geometry(g), values(g.cells(), 0.0) {}

  double& at(int col, int row) { return values[col + static_cast<std::size_t>(row) * geometry.width]; }
  double at(int col, int row) const { return values[col + static_cast<std::size_t>(row) * geometry.width]; }
  std::size_t count_nonzero() const;
};

struct InstanceEmbedding {
  std::vector<double> feature;
  Category category = Category::divider;
  double score = 0.0;
  BBox bbox;
};

/// Weights of the combined training objective.
struct LossWeights {
  double cls = defaults::kLambdaCls;
  double pts = defaults::kLambdaPts;
  double dirs = defaults::kLambdaDirs;
  double cst = defaults::kLambdaCst;
  double ol = defaults::kLambdaOl;
  double var = defaults::kLambdaVar;
  double dist = defaults::kLambdaDist;

  void validate() const;
};

struct EvalConfig {
  std::vector<double> cd_thresholds{defaults::kCdThresholds.begin(), defaults::kCdThresholds.end()};
  double range_x = defaults::kRangeX;
  double range_y = defaults::kRangeY;
  int resample_n = defaults::kEvalResampleN;

  void validate() const;
};

/// Dense row-major matrix used for cost tables and feature fields.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  bool empty() const { return rows == 0 || cols == 0; }
};

}  // namespace vecmap
