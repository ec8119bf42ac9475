#include "vecmap/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vecmap {

namespace {

// Rows <= cols. Returns for each row the assigned column.
std::vector<std::size_t> hungarian_rows_le_cols(const Matrix& a) {
  const std::size_t n = a.rows;
  const std::size_t m = a.cols;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Matrix& cost) {
  if (cost.empty()) return {};
  for (double c : cost.data) {
    if (!std::isfinite(c)) throw InvalidInput("solve_assignment: non-finite cost");
  }
  Assignment out;
  if (cost.rows <= cost.cols) {
    const auto cols = hungarian_rows_le_cols(cost);
    for (std::size_t r = 0; r < cols.size(); ++r) out.emplace_back(r, cols[r]);
  } else {
    Matrix t(cost.cols, cost.rows);
    for (std::size_t r = 0; r < cost.rows; ++r)
      for (std::size_t c = 0; c < cost.cols; ++c) t(c, r) = cost(r, c);
    const auto rows = hungarian_rows_le_cols(t);
    for (std::size_t c = 0; c < rows.size(); ++c) out.emplace_back(rows[c], c);
    std::sort(out.begin(), out.end());
  }
  return out;
}

double assignment_cost(const Matrix& cost, const Assignment& pairs) {
  double total = 0.0;
  for (const auto& [r, c] : pairs) total += cost(r, c);
  return total;
}

std::vector<Vec2> apply_ordering(std::span<const Vec2> gt, const PointOrdering& ordering) {
  const std::size_t n = gt.size();
  std::vector<Vec2> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t k = (j + static_cast<std::size_t>(ordering.shift)) % n;
    if (ordering.reversed) k = n - 1 - k;
    out[j] = gt[k];
  }
  return out;
}

PointMatch match_points(std::span<const Vec2> pred, std::span<const Vec2> gt, bool closed) {
  if (pred.size() != gt.size()) throw InvalidInput("match_points: point counts differ");
  const std::size_t n = gt.size();
  PointMatch best{{}, std::numeric_limits<double>::infinity()};
  const int shifts = closed ? static_cast<int>(n) : 1;
  for (bool reversed : {false, true}) {
    for (int s = 0; s < shifts; ++s) {
      double cost = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t k = (j + static_cast<std::size_t>(s)) % n;
        if (reversed) k = n - 1 - k;
        cost += manhattan(pred[j], gt[k]);
      }
      // Strict comparison keeps the earliest candidate in enumeration order.
      if (cost < best.cost) best = {{reversed, s}, cost};
    }
  }
  if (n == 0) best = {{}, 0.0};
  return best;
}

double instance_cost(const PolyInstance& pred, const PolyInstance& gt, const MatchCostConfig& cfg) {
  if (!pred.class_probs) throw InvalidInput("instance_cost: prediction lacks class probabilities");
  for (double p : *pred.class_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("instance_cost: probability outside [0,1]");
  }
  if (pred.points.empty()) throw InvalidInput("instance_cost: empty instance");
  const double p_gt = (*pred.class_probs)[index_of(gt.category)];
  const PointMatch pm = match_points(pred.points, gt.points, gt.closed);
  return cfg.w_cls * (1.0 - p_gt) + cfg.w_pts * pm.cost / static_cast<double>(gt.points.size());
}

long MatchResult::pair_of_pred(std::size_t p) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].pred == p) return static_cast<long>(i);
  }
  return -1;
}

MatchResult match_instances(std::span<const PolyInstance> preds, std::span<const PolyInstance> gts, int n_points,
                            const MatchCostConfig& cfg) {
  MatchResult result;
  std::vector<PolyInstance> rp;
  std::vector<PolyInstance> rg;
  for (const auto& p : preds) {
    PolyInstance r = p;
    r.points = resample_polyline(p, n_points);
    if (!r.class_probs) {
      ClassProbs one_hot{};
      one_hot[index_of(p.category)] = 1.0;
      r.class_probs = one_hot;
    }
    result.pred_points.push_back(r.points);
    rp.push_back(std::move(r));
  }
  for (const auto& g : gts) {
    PolyInstance r = g;
    r.points = resample_polyline(g, n_points);
    result.gt_points.push_back(r.points);
    rg.push_back(std::move(r));
  }
  if (rp.empty() || rg.empty()) return result;

  Matrix cost(rp.size(), rg.size());
  for (std::size_t i = 0; i < rp.size(); ++i)
    for (std::size_t j = 0; j < rg.size(); ++j) cost(i, j) = instance_cost(rp[i], rg[j], cfg);

  const Assignment assignment = solve_assignment(cost);
  result.total_cost = assignment_cost(cost, assignment);
  for (const auto& [i, j] : assignment) {
    const PointMatch pm = match_points(rp[i].points, rg[j].points, rg[j].closed);
    result.pairs.push_back({i, j, pm.ordering, pm.cost});
  }
  return result;
}

}  // namespace vecmap
