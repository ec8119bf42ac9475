#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_support.hpp"
#include "vecmap/eval.hpp"
#include "vecmap/synth.hpp"

using namespace vecmap;
using vecmap::testing::Rng;

namespace {

long double oracle_cd(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto directed = [](const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
    long double s = 0;
    for (const auto& u : p) {
      long double best = INFINITY;
      for (const auto& v : q) best = std::min(best, std::hypot(static_cast<long double>(u.x) - v.x,
                                                                 static_cast<long double>(u.y) - v.y));
      s += best;
    }
    return s / p.size();
  };
  return 0.5L * (directed(a, b) + directed(b, a));
}

// Greedy matching oracle that scans every (pred, gt) pair explicitly.
std::vector<ScoredFlag> oracle_match(const Matrix& cd, const std::vector<double>& scores, double thr) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::vector<bool> taken(cd.cols, false);
  std::vector<ScoredFlag> out;
  for (std::size_t p : order) {
    long best = -1;
    for (std::size_t g = 0; g < cd.cols; ++g)
      if (!taken[g] && (best < 0 || cd(p, g) < cd(p, static_cast<std::size_t>(best)))) best = static_cast<long>(g);
    const bool tp = best >= 0 && cd(p, static_cast<std::size_t>(best)) <= thr;
    if (tp) taken[static_cast<std::size_t>(best)] = true;
    out.push_back({scores[p], tp});
  }
  return out;
}

LocalVectorMap frame(std::int64_t id, std::vector<PolyInstance> inst) {
  LocalVectorMap m;
  m.frame_id = id;
  m.instances = std::move(inst);
  return m;
}

}  // namespace

TEST_CASE("chamfer_distance examples and oracle") {
  const std::vector<Vec2> a{{0, 0}, {1, 1}};
  CHECK(chamfer_distance(a, a) == 0.0);
  const std::vector<Vec2> o{{0, 0}}, p{{3, 4}};
  CHECK(chamfer_distance(o, p) == 5.0);
  CHECK_THROWS_AS(chamfer_distance(o, std::vector<Vec2>{}), InvalidInput);

  Rng rng(701);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = rng.points(rng.integer(1, 50));
    const auto y = rng.points(rng.integer(1, 50));
    const double cd = chamfer_distance(x, y);
    CHECK(std::abs(cd - static_cast<double>(oracle_cd(x, y))) <= 1e-12);
    CHECK(std::abs(cd - chamfer_distance(y, x)) <= 1e-12);
  }
}

TEST_CASE("match_for_eval examples") {
  const std::vector<std::vector<Vec2>> gts{{{0, 0}, {1, 0}}, {{0, 5}, {1, 5}}};
  std::vector<ScoredPolyline> preds{{gts[0], 1.0}, {gts[1], 1.0}};
  for (const auto& f : match_for_eval(preds, gts, 0.5)) CHECK(f.tp);
  for (const auto& f : match_for_eval(preds, std::vector<std::vector<Vec2>>{}, 0.5)) CHECK_FALSE(f.tp);
}

TEST_CASE("match_for_eval equals the exhaustive greedy oracle") {
  Rng rng(703);
  for (int trial = 0; trial < 300; ++trial) {
    Matrix cd(3, 2);
    for (double& v : cd.data) v = rng.uniform(0, 2);
    std::vector<double> scores(3);
    for (double& s : scores) s = std::floor(rng.uniform(0, 4)) / 4;  // ties on purpose
    const double thr = rng.uniform(0.2, 1.5);
    const auto got = match_for_eval(cd, scores, thr);
    const auto expect = oracle_match(cd, scores, thr);
    REQUIRE(got.size() == expect.size());
    int tps = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].tp == expect[i].tp);
      CHECK(got[i].score == expect[i].score);
      tps += got[i].tp;
    }
    CHECK(tps <= 2);
  }
}

TEST_CASE("ap_single examples") {
  const std::vector<ScoredFlag> all_tp{{0.9, true}, {0.8, true}};
  CHECK(ap_single(all_tp, 2) == 1.0);
  CHECK(ap_single(std::vector<ScoredFlag>{}, 3) == 0.0);
  const std::vector<ScoredFlag> tft{{0.9, true}, {0.8, false}, {0.7, true}};
  CHECK(ap_single(tft, 2) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  Diagnostics diag;
  CHECK(ap_single(std::vector<ScoredFlag>{}, 0, &diag) == 0.0);
  CHECK(diag.undefined_ap == 1);
}

TEST_CASE("ap_single is invariant to score-preserving reordering") {
  Rng rng(709);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredFlag> f(rng.integer(1, 12));
    for (auto& x : f) x = {rng.uniform(), rng.uniform() < 0.6};
    const int n_gt = static_cast<int>(f.size()) + rng.integer(0, 3);
    const double a = ap_single(f, n_gt);
    std::shuffle(f.begin(), f.end(), rng.engine());
    CHECK(ap_single(f, n_gt) == doctest::Approx(a).epsilon(1e-14));
    CHECK((a >= 0.0 && a <= 1.0));
  }
}

TEST_CASE("clip_to_range") {
  const PolyInstance inside{Category::divider, {{-1, 0}, {1, 0}}, false, {}, {}};
  const auto kept = clip_to_range(inside, 30, 15);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].points == inside.points);

  const PolyInstance crossing{Category::divider, {{-40, 0}, {40, 0}}, false, {}, {}};
  const auto cut = clip_to_range(crossing, 30, 15);
  REQUIRE(cut.size() == 1);
  CHECK(cut[0].points.front().x == doctest::Approx(-30));
  CHECK(cut[0].points.back().x == doctest::Approx(30));

  const PolyInstance out{Category::divider, {{40, 0}, {50, 0}}, false, {}, {}};
  CHECK(clip_to_range(out, 30, 15).empty());

  // Leaves and re-enters: two pieces.
  const PolyInstance dip{Category::boundary, {{0, 10}, {0, 20}, {5, 20}, {5, 10}}, false, {}, {}};
  CHECK(clip_to_range(dip, 30, 15).size() == 2);
}

TEST_CASE("evaluate examples") {
  SceneConfig sc;
  sc.seed = 3;
  const auto gt = generate_scene(sc);
  const auto self = evaluate(gt, gt);
  CHECK(self.map == 1.0);
  for (const auto& per : self.ap)
    for (double a : per) CHECK(a == 1.0);
  CHECK(self.frames == sc.n_frames);

  std::vector<LocalVectorMap> empty;
  for (const auto& f : gt) empty.push_back(frame(f.frame_id, {}));
  CHECK(evaluate(empty, gt).map == 0.0);

  std::vector<LocalVectorMap> short_seq(gt.begin(), gt.end() - 1);
  CHECK_THROWS_AS(evaluate(short_seq, gt), InvalidInput);
  auto renumbered = gt;
  renumbered[0].frame_id += 100;
  CHECK_THROWS_AS(evaluate(renumbered, gt), InvalidInput);
}

TEST_CASE("evaluate: mAP is the mean of category APs and thresholds only help") {
  SceneConfig sc;
  sc.seed = 9;
  const auto gt = generate_scene(sc);
  std::vector<LocalVectorMap> preds;
  PredictionNoise noise{17, 0.5, 0.1, 0.5, 0.2};
  for (const auto& f : gt) preds.push_back(simulate_predictions(f, noise));
  const auto r = evaluate(preds, gt);
  double mean = 0.0;
  for (int c = 0; c < kNumCategories; ++c) {
    double s = 0.0;
    for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
      s += r.ap[c][t];
      CHECK((r.ap[c][t] >= 0.0 && r.ap[c][t] <= 1.0));
      if (t > 0) CHECK(r.ap[c][t] >= r.ap[c][t - 1]);
    }
    CHECK(r.category_ap[c] == doctest::Approx(s / r.thresholds.size()));
    mean += r.category_ap[c];
  }
  CHECK(r.map == doctest::Approx(mean / kNumCategories));
}

TEST_CASE("evaluate: AP does not improve with more point noise") {
  const double sigmas[] = {0.2, 0.5, 1.0};
  double prev[kNumCategories] = {2.0, 2.0, 2.0};
  for (double sigma : sigmas) {
    double acc[kNumCategories] = {0, 0, 0};
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      SceneConfig sc;
      sc.seed = seed;
      const auto gt = generate_scene(sc);
      std::vector<LocalVectorMap> preds;
      const PredictionNoise noise{derive_seed(seed, 1), sigma, 0.0, 0.0, 0.0};
      for (const auto& f : gt) preds.push_back(simulate_predictions(f, noise));
      const auto r = evaluate(preds, gt);
      for (int c = 0; c < kNumCategories; ++c) acc[c] += r.category_ap[c] / 4;
    }
    for (int c = 0; c < kNumCategories; ++c) {
      CHECK(acc[c] <= prev[c]);
      prev[c] = acc[c];
    }
  }
}
