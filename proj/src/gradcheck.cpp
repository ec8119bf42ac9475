#include "vecmap/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vecmap/contrastive.hpp"
#include "vecmap/synth.hpp"
#include "vecmap/temporal.hpp"

namespace vecmap {

namespace {

struct ContrastiveCase {
  std::vector<InstanceEmbedding> current;
  std::vector<InstanceEmbedding> history;
  std::vector<ContrastiveTriplet> triplets;
};

ContrastiveCase random_contrastive_case(SplitMix64& rng, int dim) {
  ContrastiveCase c;
  const auto draw = [&](Category cat) {
    InstanceEmbedding e;
    e.category = cat;
    e.score = rng.uniform();
    e.bbox.center = {rng.uniform(-10.0, 10.0), rng.uniform(-5.0, 5.0)};
    e.feature.resize(dim);
    for (double& x : e.feature) x = 0.5 * rng.normal();
    return e;
  };
  for (Category cat : kAllCategories) {
    const int n_cur = rng.uniform_int(1, 4);
    const int n_his = rng.uniform_int(1, 3);
    for (int i = 0; i < n_cur; ++i) c.current.push_back(draw(cat));
    for (int i = 0; i < n_his; ++i) c.history.push_back(draw(cat));
  }
  ContrastiveConfig cfg;
  cfg.positive_radius = 1e9;
  c.triplets = mine_triplets(c.current, c.history, cfg);
  return c;
}

GridMap random_grid(SplitMix64& rng, const GridGeometry& g) {
  GridMap m(g);
  for (double& v : m.values) v = rng.uniform();
  return m;
}

}  // namespace

std::vector<double> central_differences(const std::function<double()>& f, std::span<double* const> coords,
                                        double h) {
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double& x = *coords[i];
    const double saved = x;
    x = saved + h;
    const double up = f();
    x = saved - h;
    const double down = f();
    x = saved;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0;
  double na = 0.0;
  double nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(std::max(na, nn));
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

GradCheckReport run_gradcheck(const GradCheckConfig& cfg) {
  GradCheckReport rep;
  const double corrupt = cfg.inject_error ? 1.01 : 1.0;

  SplitMix64 rng(derive_seed(cfg.seed, 0xC0417A57ULL));
  while (rep.contrastive_cases < cfg.contrastive_cases) {
    ContrastiveCase c = random_contrastive_case(rng, cfg.dim);
    if (c.triplets.empty()) continue;
    const ContrastiveGrad g = contrastive_loss_grad(c.current, c.history, c.triplets);

    std::vector<double*> coords;
    std::vector<double> analytic;
    for (std::size_t i = 0; i < c.current.size(); ++i) {
      for (std::size_t d = 0; d < c.current[i].feature.size(); ++d) {
        coords.push_back(&c.current[i].feature[d]);
        analytic.push_back(corrupt * g.d_current[i][d]);
      }
    }
    for (std::size_t i = 0; i < c.history.size(); ++i) {
      for (std::size_t d = 0; d < c.history[i].feature.size(); ++d) {
        coords.push_back(&c.history[i].feature[d]);
        analytic.push_back(corrupt * g.d_history[i][d]);
      }
    }
    const auto numeric = central_differences(
        [&] { return contrastive_loss(c.current, c.history, c.triplets); }, coords, cfg.step);
    rep.max_rel_err_contrastive = std::max(rep.max_rel_err_contrastive, relative_error(analytic, numeric));
    ++rep.contrastive_cases;
  }

  const GridGeometry geom{cfg.grid_width, cfg.grid_height, 1.0, -0.5 * cfg.grid_width, -0.5 * cfg.grid_height};
  for (int k = 0; k < cfg.mo_cases; ++k) {
    GridMap current = random_grid(rng, geom);
    std::vector<AlignedGrid> history;
    for (int i = 0; i < 2; ++i) {
      const GridMap past = random_grid(rng, geom);
      const Pose2 past_pose{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-0.3, 0.3)};
      history.push_back(align_grid(past, past_pose, Pose2::identity()));
    }
    const auto grad = mo_loss_grad(current, history);

    std::vector<double*> coords;
    std::vector<double> analytic;
    for (std::size_t i = 0; i < current.values.size(); ++i) {
      const bool near_kink = std::any_of(history.begin(), history.end(), [&](const AlignedGrid& h) {
        return h.valid[i] && std::abs(current.values[i] - h.values[i]) < cfg.tie_margin;
      });
      if (near_kink) {
        ++rep.excluded_cells;
        continue;
      }
      coords.push_back(&current.values[i]);
      analytic.push_back(corrupt * grad[i]);
    }
    const auto numeric = central_differences([&] { return mo_loss(current, history); }, coords, cfg.step);
    rep.max_rel_err_mo = std::max(rep.max_rel_err_mo, relative_error(analytic, numeric));
    ++rep.mo_cases;
  }

  rep.passed = rep.max_rel_err_contrastive <= cfg.tolerance && rep.max_rel_err_mo <= cfg.tolerance;
  return rep;
}

}  // namespace vecmap
