#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_support.hpp"
#include "vecmap/matching.hpp"

using namespace vecmap;
using vecmap::testing::Rng;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(0.0, 10.0);
  return m;
}

// Minimum over every injective map from the smaller side to the larger one.
double brute_force_min(const Matrix& m) {
  const bool t = m.rows > m.cols;
  const std::size_t small = t ? m.cols : m.rows;
  const std::size_t large = t ? m.rows : m.cols;
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < small; ++i) s += t ? m(perm[i], i) : m(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double ordering_cost(std::span<const Vec2> pred, std::span<const Vec2> gt, bool rev, int shift) {
  const std::size_t n = gt.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + static_cast<std::size_t>(shift)) % n;
    const Vec2 g = rev ? gt[n - 1 - k] : gt[k];
    s += std::abs(pred[j].x - g.x) + std::abs(pred[j].y - g.y);
  }
  return s;
}

double brute_force_points(std::span<const Vec2> pred, std::span<const Vec2> gt, bool closed) {
  double best = INFINITY;
  const int shifts = closed ? static_cast<int>(gt.size()) : 1;
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < shifts; ++s) best = std::min(best, ordering_cost(pred, gt, r == 1, s));
  return best;
}

}  // namespace

TEST_CASE("solve_assignment examples") {
  Matrix diag(3, 3, 5.0);
  for (std::size_t i = 0; i < 3; ++i) diag(i, i) = 0.0;
  const auto a = solve_assignment(diag);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == std::pair<std::size_t, std::size_t>{i, i});
  CHECK(assignment_cost(diag, a) == 0.0);

  Matrix m(2, 2);
  m.data = {1, 2, 2, 1};
  const auto b = solve_assignment(m);
  CHECK(b == Assignment{{0, 0}, {1, 1}});
  CHECK(assignment_cost(m, b) == 2.0);

  CHECK(solve_assignment(Matrix{}).empty());
  CHECK(solve_assignment(Matrix(0, 4)).empty());
}

TEST_CASE("solve_assignment equals the permutation brute force") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto r = static_cast<std::size_t>(rng.integer(1, 6));
    const auto c = static_cast<std::size_t>(rng.integer(1, 6));
    const Matrix m = random_matrix(rng, r, c);
    const auto a = solve_assignment(m);
    CHECK(a.size() == std::min(r, c));
    std::vector<bool> used_r(r), used_c(c);
    for (auto [i, j] : a) {
      CHECK_FALSE(used_r[i]);
      CHECK_FALSE(used_c[j]);
      used_r[i] = used_c[j] = true;
    }
    CHECK(assignment_cost(m, a) == doctest::Approx(brute_force_min(m)).epsilon(1e-12));
  }
}

TEST_CASE("solve_assignment never loses to a random permutation") {
  Rng rng(103);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 6;
    const Matrix m = random_matrix(rng, n, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m(i, perm[i]);
    const double best = assignment_cost(m, solve_assignment(m));
    if (best > s + 1e-9) FAIL("assignment beaten by a random permutation");
  }
}

TEST_CASE("match_points examples") {
  const std::vector<Vec2> gt{{0, 0}, {1, 0}, {2, 1}, {3, 3}};
  const auto same = match_points(gt, gt, false);
  CHECK(same.ordering == PointOrdering{false, 0});
  CHECK(same.cost == 0.0);

  std::vector<Vec2> rev(gt.rbegin(), gt.rend());
  const auto r = match_points(rev, gt, false);
  CHECK(r.ordering == PointOrdering{true, 0});
  CHECK(r.cost == 0.0);

  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vec2> shifted{{1, 1}, {0, 1}, {0, 0}, {1, 0}};
  const auto s = match_points(shifted, square, true);
  CHECK(s.ordering == PointOrdering{false, 2});
  CHECK(s.cost == 0.0);
  CHECK(apply_ordering(square, s.ordering) == shifted);

  const std::vector<Vec2> three{{0, 0}, {1, 0}, {2, 0}};
  CHECK_THROWS_AS(match_points(three, square, true), InvalidInput);
}

TEST_CASE("match_points equals brute force over admissible orderings") {
  Rng rng(107);
  for (int trial = 0; trial < 400; ++trial) {
    const bool closed = trial % 2 == 0;
    const int n = rng.integer(2, 8);
    const auto gt = rng.points(n);
    const auto pred = rng.points(n);
    const auto m = match_points(pred, gt, closed);
    CHECK(m.cost == doctest::Approx(brute_force_points(pred, gt, closed)).epsilon(1e-12));
    const auto reordered = apply_ordering(gt, m.ordering);
    CHECK(ordering_cost(pred, reordered, false, 0) == doctest::Approx(m.cost).epsilon(1e-12));
    if (!closed) CHECK(m.ordering.shift == 0);
  }
}

TEST_CASE("match_points cost is symmetric under reversing both sequences") {
  Rng rng(109);
  for (int trial = 0; trial < 200; ++trial) {
    const bool closed = trial % 2 == 0;
    const int n = rng.integer(2, 8);
    auto gt = rng.points(n);
    auto pred = rng.points(n);
    const double c0 = match_points(pred, gt, closed).cost;
    std::reverse(gt.begin(), gt.end());
    std::reverse(pred.begin(), pred.end());
    CHECK(match_points(pred, gt, closed).cost == doctest::Approx(c0).epsilon(1e-12));
  }
}

TEST_CASE("closed match_points is invariant to the gt start point") {
  Rng rng(113);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(3, 8);
    auto gt = rng.points(n);
    const auto pred = rng.points(n);
    const double c0 = match_points(pred, gt, true).cost;
    std::rotate(gt.begin(), gt.begin() + rng.integer(0, n - 1), gt.end());
    CHECK(match_points(pred, gt, true).cost == doctest::Approx(c0).epsilon(1e-12));
  }
}

TEST_CASE("instance_cost") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {2, 0}};
  PolyInstance gt{Category::divider, pts, false, {}, {}};
  PolyInstance pred{Category::divider, pts, false, 1.0, ClassProbs{1.0, 0.0, 0.0}};
  const MatchCostConfig cfg;
  CHECK(instance_cost(pred, gt, cfg) == 0.0);
  pred.class_probs = ClassProbs{0.0, 0.5, 0.5};
  CHECK(instance_cost(pred, gt, cfg) == cfg.w_cls);
  pred.class_probs = ClassProbs{1.2, 0.0, 0.0};
  CHECK_THROWS_AS(instance_cost(pred, gt, cfg), InvalidInput);

  Rng rng(127);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 6);
    PolyInstance g{Category::boundary, rng.points(n), trial % 2 == 0, {}, {}};
    const double p = rng.uniform();
    PolyInstance q{Category::boundary, rng.points(n), g.closed, p, ClassProbs{0.0, 1.0 - p, p}};
    const MatchCostConfig c{rng.uniform(0, 3), rng.uniform(0, 3)};
    const double expect = c.w_cls * (1.0 - p) + c.w_pts * brute_force_points(q.points, g.points, g.closed) / n;
    CHECK(instance_cost(q, g, c) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("match_instances pairs each prediction with its own ground truth") {
  Rng rng(131);
  std::vector<PolyInstance> gts;
  for (int i = 0; i < 4; ++i) {
    const double y = -6.0 + 4.0 * i;
    gts.push_back({Category::divider, {{-10, y}, {0, y + 0.5}, {10, y}}, false, {}, {}});
  }
  std::vector<PolyInstance> preds;
  const std::vector<int> order{2, 0, 3, 1};
  for (int k : order) {
    PolyInstance p = gts[k];
    for (auto& v : p.points) v = {v.x + rng.normal(0.1), v.y + rng.normal(0.1)};
    std::reverse(p.points.begin(), p.points.end());
    p.class_probs = ClassProbs{0.9, 0.05, 0.05};
    preds.push_back(p);
  }
  preds.push_back({Category::boundary, {{20, 20}, {25, 20}}, false, 0.2, ClassProbs{0.0, 0.0, 0.2}});
  const auto m = match_instances(preds, gts, 20);
  CHECK(m.pairs.size() == 4);
  for (const auto& p : m.pairs) {
    CHECK(p.gt == static_cast<std::size_t>(order[p.pred]));
    CHECK(p.ordering.reversed);
  }
  CHECK(m.pair_of_pred(4) == -1);
  CHECK(m.pred_points[0].size() == 20);
}
