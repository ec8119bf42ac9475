#include "vecmap/preselect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace vecmap {

std::vector<NormCoord> topk_coords(std::span<const double> scores, int width, int height, int k) {
  if (width <= 0 || height <= 0) throw InvalidInput("topk_coords: empty map");
  const std::size_t cells = static_cast<std::size_t>(width) * height;
  if (scores.size() != cells) throw InvalidInput("topk_coords: score size does not match W*H");
  if (k < 0 || static_cast<std::size_t>(k) > cells) throw InvalidInput("topk_coords: k exceeds H*W");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidInput("topk_coords: non-finite score");
  }

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  const auto better = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);

  std::vector<NormCoord> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    out.push_back({static_cast<double>(idx % width) / width, static_cast<double>(idx / width) / height});
  }
  return out;
}

std::vector<std::size_t> flat_indices(std::span<const NormCoord> coords, int width, int height, Diagnostics* diag) {
  std::vector<std::size_t> out;
  out.reserve(coords.size());
  const auto to_cell = [diag](double v, int extent) {
    const double r = std::round(v * extent);
    if (r < 0.0 || r > extent - 1) {
      if (diag) ++diag->clamped_indices;
      return r < 0.0 ? 0L : static_cast<long>(extent - 1);
    }
    return static_cast<long>(r);
  };
  for (const NormCoord& c : coords) {
    const long col = to_cell(c.col, width);
    const long row = to_cell(c.row, height);
    out.push_back(static_cast<std::size_t>(col + row * width));
  }
  return out;
}

Matrix gather_features(const Matrix& field, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), field.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= field.rows) throw InvalidInput("gather_features: index out of range");
    std::copy_n(field.row(indices[i]).begin(), field.cols, out.row(i).begin());
  }
  return out;
}

Matrix encode_positions(std::span<const NormCoord> coords, int dim) {
  if (dim <= 0 || dim % 2 != 0) throw InvalidConfig("encode_positions: dimension must be positive and even");
  const int pairs = dim / 2;
  const int freqs = (pairs + 1) / 2;
  std::vector<double> omega(freqs);
  for (int k = 0; k < freqs; ++k) {
    omega[k] = std::numbers::pi * std::pow(100.0, -static_cast<double>(k) / freqs);
  }
  Matrix out(coords.size(), static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (int j = 0; j < pairs; ++j) {
      const double a = (j % 2 == 0 ? coords[i].col : coords[i].row) * omega[j / 2];
      out(i, 2 * j) = std::sin(a);
      out(i, 2 * j + 1) = std::cos(a);
    }
  }
  return out;
}

PointQuery build_point_queries(const ScoreMap& scores, const Matrix& field, int points_per_instance, int dim) {
  if (field.rows != scores.plane()) throw InvalidInput("build_point_queries: feature field does not cover H*W");
  if (field.cols != static_cast<std::size_t>(dim)) throw InvalidInput("build_point_queries: feature dim mismatch");
  if (scores.values.size() != scores.plane() * scores.channels) {
    throw InvalidInput("build_point_queries: score map size inconsistent");
  }

  PointQuery q;
  q.instances = scores.channels;
  q.points = points_per_instance;
  q.channels = dim;
  q.coords.reserve(static_cast<std::size_t>(scores.channels) * points_per_instance);
  q.features.reserve(q.coords.capacity() * dim);
  for (int c = 0; c < scores.channels; ++c) {
    const auto coords = topk_coords(scores.channel(c), scores.width, scores.height, points_per_instance);
    const auto idx = flat_indices(coords, scores.width, scores.height);
    const Matrix inst = gather_features(field, idx);
    const Matrix geo = encode_positions(coords, dim);
    for (std::size_t p = 0; p < coords.size(); ++p) {
      q.coords.push_back(coords[p]);
      for (int d = 0; d < dim; ++d) q.features.push_back(inst(p, d) + geo(p, d));
    }
  }
  return q;
}

}  // namespace vecmap
