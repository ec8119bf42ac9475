// vecmap: command-line front end for evaluation, rasterization, temporal
// merging, loss reporting, scene simulation and gradient checks.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vecmap/eval.hpp"
#include "vecmap/gradcheck.hpp"
#include "vecmap/io.hpp"
#include "vecmap/pipeline.hpp"
#include "vecmap/raster.hpp"
#include "vecmap/synth.hpp"
#include "vecmap/temporal.hpp"

namespace {

using nlohmann::json;
using namespace vecmap;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct RunConfig {
  std::uint64_t seed = 0;
  GridGeometry grid;
  double raster_threshold = defaults::kRasterThreshold;
  EvalConfig eval;
  LossRunConfig losses;
  SceneConfig scene;
  PredictionNoise noise;
};

template <typename T>
void maybe(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

// Overlays a JSON config document onto the defaults.
void load_config(const std::string& path, RunConfig& rc) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io::ParseError(path, 0, "", e.what());
  }
  try {
    maybe(j, "seed", rc.seed);
    maybe(j, "raster_threshold", rc.raster_threshold);
    if (j.contains("grid")) {
      const json& g = j["grid"];
      maybe(g, "width", rc.grid.width);
      maybe(g, "height", rc.grid.height);
      maybe(g, "resolution", rc.grid.resolution);
      rc.grid.x_min = -0.5 * rc.grid.width * rc.grid.resolution;
      rc.grid.y_min = -0.5 * rc.grid.height * rc.grid.resolution;
      maybe(g, "x_min", rc.grid.x_min);
      maybe(g, "y_min", rc.grid.y_min);
    }
    if (j.contains("eval")) {
      const json& e = j["eval"];
      maybe(e, "cd_thresholds", rc.eval.cd_thresholds);
      maybe(e, "range_x", rc.eval.range_x);
      maybe(e, "range_y", rc.eval.range_y);
      maybe(e, "resample_n", rc.eval.resample_n);
    }
    if (j.contains("weights")) {
      const json& w = j["weights"];
      LossWeights& lw = rc.losses.weights;
      maybe(w, "cls", lw.cls);
      maybe(w, "pts", lw.pts);
      maybe(w, "dirs", lw.dirs);
      maybe(w, "cst", lw.cst);
      maybe(w, "ol", lw.ol);
      maybe(w, "var", lw.var);
      maybe(w, "dist", lw.dist);
    }
    if (j.contains("contrastive")) {
      const json& c = j["contrastive"];
      ContrastiveConfig& cc = rc.losses.contrastive;
      maybe(c, "max_anchors_per_label", cc.max_anchors_per_label);
      maybe(c, "negatives_per_label", cc.negatives_per_label);
      maybe(c, "positive_radius", cc.positive_radius);
      maybe(c, "score_tau", cc.score_tau);
      maybe(c, "mean_reduction", cc.mean_reduction);
    }
    maybe(j, "temporal_window", rc.losses.temporal_window);
    maybe(j, "match_points", rc.losses.match_points);
    if (j.contains("scene")) {
      const json& s = j["scene"];
      maybe(s, "n_frames", rc.scene.n_frames);
      maybe(s, "ego_step", rc.scene.ego_step);
      maybe(s, "yaw_rate", rc.scene.yaw_rate);
      maybe(s, "dividers_min", rc.scene.dividers_min);
      maybe(s, "dividers_max", rc.scene.dividers_max);
      maybe(s, "crossings_min", rc.scene.crossings_min);
      maybe(s, "crossings_max", rc.scene.crossings_max);
    }
    if (j.contains("noise")) {
      const json& n = j["noise"];
      maybe(n, "point_sigma", rc.noise.point_sigma);
      maybe(n, "drop_prob", rc.noise.drop_prob);
      maybe(n, "fp_rate", rc.noise.fp_rate);
      maybe(n, "score_noise", rc.noise.score_noise);
    }
  } catch (const json::exception& e) {
    throw io::ParseError(path, 0, "", e.what());
  }
}

// Flags shared by every subcommand.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> threshold;
  std::optional<double> resolution;
  std::string grid;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration overriding the defaults");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--out", f.out, "Output path");
  cmd->add_option("--threshold", f.threshold, "Rasterization confidence threshold");
  cmd->add_option("--resolution", f.resolution, "Grid resolution in meters per cell");
  cmd->add_option("--grid", f.grid, "Grid size as WxH cells");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig rc;
  if (!f.config.empty()) load_config(f.config, rc);
  if (f.seed) rc.seed = *f.seed;
  if (f.threshold) rc.raster_threshold = *f.threshold;
  bool regrid = false;
  if (!f.grid.empty()) {
    const auto x = f.grid.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("missing 'x'");
      rc.grid.width = std::stoi(f.grid.substr(0, x));
      rc.grid.height = std::stoi(f.grid.substr(x + 1));
    } catch (const std::exception&) {
      throw InvalidConfig("--grid expects WxH, got '" + f.grid + "'");
    }
    regrid = true;
  }
  if (f.resolution) {
    rc.grid.resolution = *f.resolution;
    regrid = true;
  }
  if (regrid) rc.grid = centered_grid(rc.grid.width, rc.grid.height, rc.grid.resolution);
  rc.grid.validate();
  rc.losses.seed = rc.seed;
  rc.losses.raster.geometry = rc.grid;
  rc.losses.raster.conf_threshold = rc.raster_threshold;
  rc.scene.seed = rc.seed;
  rc.noise.seed = derive_seed(rc.seed, 1);
  return rc;
}

const LocalVectorMap& frame_by_id(const std::vector<LocalVectorMap>& frames, std::int64_t id) {
  for (const auto& f : frames) {
    if (f.frame_id == id) return f;
  }
  throw InvalidInput("frame id " + std::to_string(id) + " not present in sequence");
}

std::string loss_report_json(const LossReport& r) {
  const auto parts = [](const LossParts& p) {
    return json{{"cls", p.cls}, {"pts", p.pts}, {"dirs", p.dirs}, {"cst", p.cst},
                {"ol", p.ol},   {"var", p.var}, {"dist", p.dist}};
  };
  json frames = json::array();
  for (const FrameLosses& f : r.frames) {
    frames.push_back({{"frame_id", f.frame_id}, {"parts", parts(f.parts)}, {"pts_mean", f.pts_mean},
                      {"total", f.total}, {"matched", f.matched}});
  }
  return json{{"frames", frames}, {"mean", parts(r.mean)}, {"total", r.total}}.dump(1) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vectorized HD map losses, temporal consistency and evaluation"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string pred_path;
  std::string gt_path;
  std::string map_path;
  std::string seq_path;
  std::int64_t target_frame = 0;
  std::size_t frame_index = 0;
  std::string pred_out;
  std::optional<double> sigma;
  std::optional<double> drop;
  std::optional<double> fp_rate;
  std::optional<double> score_noise;
  std::optional<int> n_frames;
  std::optional<double> ego_step;
  std::optional<double> yaw_rate;
  bool inject_error = false;

  auto* evaluate = app.add_subcommand("evaluate", "Chamfer-distance AP / mAP of predictions against ground truth");
  add_common(evaluate, common);
  evaluate->add_option("--pred", pred_path, "Prediction map file")->required();
  evaluate->add_option("--gt", gt_path, "Ground-truth map file")->required();

  auto* rasterize = app.add_subcommand("rasterize", "Rasterize one frame of a map file into a grid file");
  add_common(rasterize, common);
  rasterize->add_option("--map", map_path, "Map file")->required();
  rasterize->add_option("--frame-index", frame_index, "Frame position in the file (default 0)");

  auto* merge = app.add_subcommand("merge", "Rasterize a sequence and merge it into one frame");
  add_common(merge, common);
  merge->add_option("--sequence", seq_path, "Map file with posed frames")->required();
  merge->add_option("--target-frame", target_frame, "frame_id whose pose receives the merge")->required();

  auto* losses = app.add_subcommand("losses", "Match predictions to ground truth and report every loss term");
  add_common(losses, common);
  losses->add_option("--pred", pred_path, "Prediction map file")->required();
  losses->add_option("--gt", gt_path, "Ground-truth map file")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic ground-truth scene and noisy predictions");
  add_common(simulate, common);
  simulate->add_option("--pred-out", pred_out, "Also write simulated predictions here");
  simulate->add_option("--sigma", sigma, "Point jitter standard deviation (m)");
  simulate->add_option("--drop", drop, "Instance drop probability");
  simulate->add_option("--fp", fp_rate, "False-positive rate per instance");
  simulate->add_option("--score-noise", score_noise, "Score noise scale");
  simulate->add_option("--frames", n_frames, "Number of frames");
  simulate->add_option("--ego-step", ego_step, "Ego advance per frame (m)");
  simulate->add_option("--yaw-rate", yaw_rate, "Heading change per frame (rad)");

  auto* gradcheck = app.add_subcommand("grad-check", "Finite-difference check of the analytic gradients");
  add_common(gradcheck, common);
  gradcheck->add_flag("--inject-error", inject_error, "Corrupt the analytic gradients (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    const RunConfig rc = resolve(common);

    if (evaluate->parsed()) {
      const auto preds = io::read_maps(pred_path);
      const auto gts = io::read_maps(gt_path);
      const EvalReport report = vecmap::evaluate(preds, gts, rc.eval);
      std::cout << io::format_report(report);
      if (!common.out.empty()) io::write_file_atomic(common.out, io::report_to_json(report));
    } else if (rasterize->parsed()) {
      if (common.out.empty()) throw InvalidConfig("rasterize requires --out");
      const auto frames = io::read_maps(map_path);
      if (frame_index >= frames.size()) throw InvalidInput("--frame-index beyond the frames in " + map_path);
      const LocalVectorMap& frame = frames[frame_index];
      const GridMap grid = rasterize_map(frame, {rc.grid, rc.raster_threshold});
      io::write_grid(common.out, grid, frame.ego_pose);
      std::cout << "frame " << frame.frame_id << ": " << grid.count_nonzero() << " occupied cells of "
                << grid.values.size() << "\n";
    } else if (merge->parsed()) {
      if (common.out.empty()) throw InvalidConfig("merge requires --out");
      const auto frames = io::read_maps(seq_path);
      if (frames.empty()) throw InvalidInput("sequence " + seq_path + " has no frames");
      const LocalVectorMap& target = frame_by_id(frames, target_frame);
      std::vector<PosedGrid> posed;
      for (const auto& f : frames) posed.push_back({rasterize_map(f, {rc.grid, rc.raster_threshold}), f.ego_pose});
      const GridMap merged = merge_grids(posed, target.ego_pose);
      io::write_grid(common.out, merged, target.ego_pose);
      std::cout << "merged " << frames.size() << " frames into frame " << target.frame_id << ": "
                << merged.count_nonzero() << " nonzero cells\n";
    } else if (losses->parsed()) {
      const auto preds = io::read_maps(pred_path);
      const auto gts = io::read_maps(gt_path);
      const LossReport report = compute_losses(preds, gts, rc.losses);
      std::cout << format_loss_report(report, rc.losses.weights);
      if (!common.out.empty()) io::write_file_atomic(common.out, loss_report_json(report));
    } else if (simulate->parsed()) {
      if (common.out.empty()) throw InvalidConfig("simulate requires --out");
      SceneConfig scene = rc.scene;
      PredictionNoise noise = rc.noise;
      if (n_frames) scene.n_frames = *n_frames;
      if (ego_step) scene.ego_step = *ego_step;
      if (yaw_rate) scene.yaw_rate = *yaw_rate;
      if (sigma) noise.point_sigma = *sigma;
      if (drop) noise.drop_prob = *drop;
      if (fp_rate) noise.fp_rate = *fp_rate;
      if (score_noise) noise.score_noise = *score_noise;
      const auto gt = generate_scene(scene);
      io::write_maps(common.out, gt);
      std::size_t n_inst = 0;
      for (const auto& f : gt) n_inst += f.instances.size();
      std::cout << "wrote " << gt.size() << " frames, " << n_inst << " instances to " << common.out << "\n";
      if (!pred_out.empty()) {
        std::vector<LocalVectorMap> preds;
        for (const auto& f : gt) preds.push_back(simulate_predictions(f, noise, scene.range_x, scene.range_y));
        io::write_maps(pred_out, preds);
        std::cout << "wrote predictions to " << pred_out << "\n";
      }
    } else if (gradcheck->parsed()) {
      GradCheckConfig gc;
      gc.seed = rc.seed;
      gc.inject_error = inject_error;
      const GradCheckReport r = run_gradcheck(gc);
      std::ostringstream os;
      os << std::scientific;
      os.precision(3);
      os << "contrastive: " << r.contrastive_cases << " cases, max rel err " << r.max_rel_err_contrastive << "\n"
         << "mo-loss:     " << r.mo_cases << " cases, max rel err " << r.max_rel_err_mo << " (" << r.excluded_cells
         << " near-tie cells excluded)\n"
         << "tolerance " << gc.tolerance << ": " << (r.passed ? "PASS" : "FAIL") << "\n";
      std::cout << os.str();
      if (!common.out.empty()) io::write_file_atomic(common.out, os.str());
      return r.passed ? kExitOk : kExitValidation;
    }
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid geometry: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
