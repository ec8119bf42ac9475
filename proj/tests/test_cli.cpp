// Drives the vecmap executable and compares it against direct library calls.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "vecmap/io.hpp"
#include "vecmap/pipeline.hpp"
#include "vecmap/raster.hpp"
#include "vecmap/synth.hpp"
#include "vecmap/temporal.hpp"

using namespace vecmap;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "vecmap_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const std::string o = path("stdout.txt"), e = path("stderr.txt");
  const std::string cmd = std::string(VECMAP_CLI_PATH) + " " + args + " >" + o + " 2>" + e;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_file(o);
  r.err = io::read_file(e);
  return r;
}

void simulate(const std::string& gt, const std::string& pred, double sigma, int seed) {
  const Run r = run("simulate --seed " + std::to_string(seed) + " --sigma " + std::to_string(sigma) +
                    " --drop 0.1 --fp 0.2 --score-noise 0.2 --out " + path(gt) + " --pred-out " + path(pred));
  REQUIRE(r.code == 0);
}

}  // namespace

TEST_CASE("simulate writes what the library generates") {
  simulate("gt.json", "pred.json", 0.2, 4);
  SceneConfig sc;
  sc.seed = 4;
  const auto gt = generate_scene(sc);
  CHECK(io::read_file(path("gt.json")) == io::dump_maps(gt));
  std::vector<LocalVectorMap> preds;
  const PredictionNoise noise{derive_seed(4, 1), 0.2, 0.1, 0.2, 0.2};
  for (const auto& f : gt) preds.push_back(simulate_predictions(f, noise));
  CHECK(io::read_file(path("pred.json")) == io::dump_maps(preds));
}

TEST_CASE("evaluate: self evaluation and library parity") {
  simulate("gt.json", "pred.json", 0.2, 4);
  const Run self = run("evaluate --pred " + path("gt.json") + " --gt " + path("gt.json"));
  CHECK(self.code == 0);
  CHECK(self.out.find("mAP 1.000") != std::string::npos);

  const Run r = run("evaluate --pred " + path("pred.json") + " --gt " + path("gt.json") + " --out " + path("ev.json"));
  REQUIRE(r.code == 0);
  const auto report = evaluate(io::read_maps(path("pred.json")), io::read_maps(path("gt.json")));
  CHECK(r.out == io::format_report(report));
  CHECK(io::read_file(path("ev.json")) == io::report_to_json(report));
}

TEST_CASE("losses: library parity and weight echo") {
  simulate("gt.json", "pred.json", 0.2, 4);
  const Run r = run("losses --seed 4 --pred " + path("pred.json") + " --gt " + path("gt.json"));
  REQUIRE(r.code == 0);
  LossRunConfig cfg;
  cfg.seed = 4;
  const auto report = compute_losses(io::read_maps(path("pred.json")), io::read_maps(path("gt.json")), cfg);
  CHECK(r.out == format_loss_report(report, cfg.weights));
  CHECK(r.out.find("lambda1=2 lambda2=5 lambda3=0.005 lambda_a=0.1 lambda_b=1 lambda_c=1 lambda_d=0.1") !=
        std::string::npos);

  const Run self = run("losses --pred " + path("gt.json") + " --gt " + path("gt.json"));
  REQUIRE(self.code == 0);
  const auto zero = compute_losses(io::read_maps(path("gt.json")), io::read_maps(path("gt.json")));
  CHECK(zero.mean.pts == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(zero.mean.dirs == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rasterize: threshold, empty map and round trip") {
  LocalVectorMap f;
  f.instances.push_back({Category::divider, {{-5, 0}, {5, 0}}, false, 0.39, ClassProbs{0.39, 0, 0}});
  io::write_maps(path("low.json"), {f});
  Run r = run("rasterize --map " + path("low.json") + " --out " + path("low.pgm"));
  REQUIRE(r.code == 0);
  CHECK(io::read_grid(path("low.pgm")).grid.count_nonzero() == 0);
  r = run("rasterize --threshold 0.3 --map " + path("low.json") + " --out " + path("low.pgm"));
  CHECK(io::read_grid(path("low.pgm")).grid.count_nonzero() > 0);

  io::write_maps(path("empty.json"), {LocalVectorMap{}});
  r = run("rasterize --map " + path("empty.json") + " --out " + path("empty.pgm"));
  REQUIRE(r.code == 0);
  const auto empty = io::read_grid(path("empty.pgm"));
  CHECK(empty.grid.count_nonzero() == 0);
  CHECK(empty.grid.geometry == GridGeometry{});

  simulate("gt.json", "pred.json", 0.2, 4);
  r = run("rasterize --map " + path("gt.json") + " --frame-index 2 --out " + path("g2.pgm"));
  REQUIRE(r.code == 0);
  const auto frames = io::read_maps(path("gt.json"));
  const GridMap mem = rasterize_map(frames[2]);
  const auto back = io::read_grid(path("g2.pgm"));
  CHECK(back.grid.values == mem.values);
  CHECK(back.pose == frames[2].ego_pose);
}

TEST_CASE("merge: single frame identity and library parity") {
  simulate("gt.json", "pred.json", 0.2, 4);
  const auto frames = io::read_maps(path("gt.json"));
  io::write_maps(path("one.json"), {frames[1]});
  Run r = run("merge --sequence " + path("one.json") + " --target-frame 1 --out " + path("one.pgm"));
  REQUIRE(r.code == 0);
  CHECK(io::read_grid(path("one.pgm")).grid.values == rasterize_map(frames[1]).values);

  r = run("merge --sequence " + path("gt.json") + " --target-frame 4 --out " + path("m.pgm"));
  REQUIRE(r.code == 0);
  std::vector<PosedGrid> posed;
  for (const auto& f : frames) posed.push_back({rasterize_map(f), f.ego_pose});
  const GridMap merged = merge_grids(posed, frames[4].ego_pose);
  CHECK(io::read_file(path("m.pgm")) == io::grid_to_pgm(merged));

  r = run("merge --sequence " + path("gt.json") + " --target-frame 99 --out " + path("m.pgm"));
  CHECK(r.code == 1);
}

TEST_CASE("malformed inputs produce diagnostics and exit codes") {
  std::ofstream(path("bad.json")) << "{\n  \"version\": 1,\n  \"frames\": [\n    {oops}\n  ]\n}\n";
  Run r = run("evaluate --pred " + path("bad.json") + " --gt " + path("bad.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.json:4") != std::string::npos);

  std::ofstream(path("nopose.json"))
      << R"({"version": 1, "frames": [{"frame_id": 0, "instances": []}]})";
  r = run("merge --sequence " + path("nopose.json") + " --target-frame 0 --out " + path("x.pgm"));
  CHECK(r.code == 2);
  CHECK(r.err.find("ego_pose") != std::string::npos);

  r = run("evaluate --pred " + path("missing.json") + " --gt " + path("missing.json"));
  CHECK(r.code == 2);

  r = run("rasterize --grid 10by4 --map " + path("empty.json") + " --out " + path("x.pgm"));
  CHECK(r.code == 1);

  r = run("frobnicate");
  CHECK(r.code == 2);
}

TEST_CASE("grad-check exits by result") {
  Run r = run("grad-check --seed 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  r = run("grad-check --seed 1 --inject-error");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}
