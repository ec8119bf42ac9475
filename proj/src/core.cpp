#include "vecmap/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vecmap {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double distance(Vec2 a, Vec2 b) { return norm(a - b); }
double manhattan(Vec2 a, Vec2 b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double wrap_angle(double rad) {
  double r = std::remainder(rad, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

Vec2 Pose2::apply(Vec2 p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * p.x - s * p.y + x, s * p.x + c * p.y + y};
}

Pose2 Pose2::inverse() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {-(c * x + s * y), s * x - c * y, wrap_angle(-yaw)};
}

Pose2 Pose2::compose(const Pose2& other) const {
  const Vec2 t = apply({other.x, other.y});
  return {t.x, t.y, wrap_angle(yaw + other.yaw)};
}

std::vector<Vec2> transform_points(const Pose2& pose, std::span<const Vec2> pts) {
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.yaw)) {
    throw InvalidInput("transform_points: non-finite pose");
  }
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidInput("transform_points: non-finite point");
    }
    out.push_back(pose.apply(p));
  }
  return out;
}

Pose2 relative_pose(const Pose2& a, const Pose2& b) {
  return a.inverse().compose(b);
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::divider:
      return "divider";
    case Category::ped_crossing:
      return "ped_crossing";
    case Category::boundary:
      return "boundary";
  }
  return "unknown";
}

Category category_from_string(std::string_view s) {
  if (s == "divider") return Category::divider;
  if (s == "ped_crossing" || s == "pedestrian_crossing") return Category::ped_crossing;
  if (s == "boundary") return Category::boundary;
  throw InvalidInput("unknown category '" + std::string(s) + "'");
}

void validate_instance(const PolyInstance& inst) {
  if (inst.points.size() < 2) {
    throw InvalidInput("instance needs at least 2 points");
  }
  for (const Vec2& p : inst.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidInput("instance has non-finite coordinates");
    }
  }
  if (inst.score && !(*inst.score >= 0.0 && *inst.score <= 1.0)) {
    throw InvalidInput("instance score outside [0,1]");
  }
  if (inst.class_probs) {
    for (double p : *inst.class_probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("class probability outside [0,1]");
    }
  }
}

double arc_length(std::span<const Vec2> pts, bool closed) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  if (closed && pts.size() > 1) len += distance(pts.back(), pts.front());
  return len;
}

std::vector<Vec2> resample_polyline(std::span<const Vec2> pts, bool closed, int n) {
  if (n < 2) throw InvalidInput("resample_polyline: n must be >= 2");
  std::vector<Vec2> verts(pts.begin(), pts.end());
  if (closed && !verts.empty()) verts.push_back(verts.front());

  std::vector<double> cum(verts.size(), 0.0);
  for (std::size_t i = 1; i < verts.size(); ++i) {
    cum[i] = cum[i - 1] + distance(verts[i - 1], verts[i]);
  }
  const double total = verts.empty() ? 0.0 : cum.back();
  if (!(total > 0.0)) throw DegenerateGeometry("resample_polyline: zero-length polyline");

  const double step = closed ? total / n : total / (n - 1);
  std::vector<Vec2> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * step;
    while (seg + 2 < verts.size() && cum[seg + 1] <= t) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double u = len > 0.0 ? std::clamp((t - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(verts[seg] + u * (verts[seg + 1] - verts[seg]));
  }
  if (!closed) out.back() = verts.back();
  return out;
}

std::vector<Vec2> resample_polyline(const PolyInstance& inst, int n) {
  return resample_polyline(inst.points, inst.closed, n);
}

BBox bbox_of(std::span<const Vec2> pts) {
  if (pts.empty()) return {};
  Vec2 lo = pts.front();
  Vec2 hi = pts.front();
  for (const Vec2& p : pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  return {{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)}, {0.5 * (hi.x - lo.x), 0.5 * (hi.y - lo.y)}};
}

void GridGeometry::validate() const {
  if (width <= 0 || height <= 0) throw InvalidConfig("grid dimensions must be positive");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw InvalidConfig("grid resolution must be positive");
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) throw InvalidConfig("grid origin must be finite");
}

GridGeometry centered_grid(int width, int height, double resolution) {
  GridGeometry g{width, height, resolution, -0.5 * width * resolution, -0.5 * height * resolution};
  g.validate();
  return g;
}

std::size_t GridMap::count_nonzero() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
}

void LossWeights::validate() const {
  for (double w : {cls, pts, dirs, cst, ol, var, dist}) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidConfig("loss weights must be finite and non-negative");
  }
}

void EvalConfig::validate() const {
  if (cd_thresholds.empty()) throw InvalidConfig("at least one CD threshold is required");
  for (std::size_t i = 0; i < cd_thresholds.size(); ++i) {
    if (!(cd_thresholds[i] > 0.0)) throw InvalidConfig("CD thresholds must be positive");
    if (i > 0 && !(cd_thresholds[i] > cd_thresholds[i - 1])) {
      throw InvalidConfig("CD thresholds must be strictly increasing");
    }
  }
  if (!(range_x > 0.0) || !(range_y > 0.0)) throw InvalidConfig("evaluation range must be positive");
  if (resample_n < 2) throw InvalidConfig("resample_n must be >= 2");
}

}  // namespace vecmap
