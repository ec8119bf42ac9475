#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vecmap/core.hpp"

namespace vecmap {

/// Per-instance score channels, stored channel-major then row-major:
/// values[c * H * W + row * W + col].
struct ScoreMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  ScoreMap() = default;
  ScoreMap(int n, int h, int w) : channels(n), height(h), width(w), values(static_cast<std::size_t>(n) * h * w, 0.0) {}

  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  std::span<const double> channel(int c) const { return {values.data() + c * plane(), plane()}; }
  std::span<double> channel(int c) { return {values.data() + c * plane(), plane()}; }
  double& at(int c, int col, int row) { return values[c * plane() + static_cast<std::size_t>(row) * width + col]; }
};

/// Normalized cell coordinate: col / W, row / H.
struct NormCoord {
  double col = 0.0;
  double row = 0.0;

  friend bool operator==(const NormCoord&, const NormCoord&) = default;
};

struct PointQuery {
  int instances = 0;
  int points = 0;
  int channels = 0;
  std::vector<NormCoord> coords;  // instances * points
  std::vector<double> features;   // instances * points * channels
};

/// The k highest-scoring cells of one channel, highest first; ties go to the
/// smaller row-major index.
std::vector<NormCoord> topk_coords(std::span<const double> scores, int width, int height, int k);

/// col + row * W of the cell each coordinate refers to. Coordinates are
/// scaled by (W, H) and rounded; out-of-grid results are clamped and counted.
std::vector<std::size_t> flat_indices(std::span<const NormCoord> coords, int width, int height,
                                      Diagnostics* diag = nullptr);

/// Row gather from a (H*W) x C feature field.
Matrix gather_features(const Matrix& field, std::span<const std::size_t> indices);

/// Sinusoidal encoding. Output pair j (dims 2j, 2j+1) holds sin/cos of
/// omega_{j/2} times col (even j) or row (odd j), with omega_k = pi * 100^(-k/K)
/// and K the number of frequencies per axis. Every frequency is at most pi, so
/// the encoding is injective and per-axis monotone in distance on [0,1].
Matrix encode_positions(std::span<const NormCoord> coords, int dim);

/// Top-k selection per channel, feature gather and positional encoding,
/// summed into point queries.
PointQuery build_point_queries(const ScoreMap& scores, const Matrix& field, int points_per_instance, int dim);

}  // namespace vecmap
