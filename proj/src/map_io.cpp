#include "vecmap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace vecmap::io {

using nlohmann::json;

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(source_, 0, path, what);
  }

  const json& member(const json& obj, const char* key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing field");
    return *it;
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "non-finite number");
    return v;
  }

  Pose2 pose(const json& j, const std::string& path) const {
    return {number(member(j, "x", path), path + ".x"), number(member(j, "y", path), path + ".y"),
            number(member(j, "yaw", path), path + ".yaw")};
  }

  PolyInstance instance(const json& j, const std::string& path) const {
    PolyInstance inst;
    const json& cat = member(j, "category", path);
    if (!cat.is_string()) fail(path + ".category", "expected a string");
    try {
      inst.category = category_from_string(cat.get<std::string>());
    } catch (const InvalidInput& e) {
      fail(path + ".category", e.what());
    }
    if (j.contains("closed")) {
      if (!j["closed"].is_boolean()) fail(path + ".closed", "expected a boolean");
      inst.closed = j["closed"].get<bool>();
    }
    if (j.contains("score") && !j["score"].is_null()) {
      inst.score = number(j["score"], path + ".score");
      if (*inst.score < 0.0 || *inst.score > 1.0) fail(path + ".score", "score outside [0,1]");
    }
    if (j.contains("class_probs") && !j["class_probs"].is_null()) {
      const json& cp = j["class_probs"];
      if (!cp.is_array() || cp.size() != kNumCategories) {
        fail(path + ".class_probs", "expected an array of " + std::to_string(kNumCategories) + " numbers");
      }
      ClassProbs probs{};
      for (int c = 0; c < kNumCategories; ++c) {
        probs[c] = number(cp[c], path + ".class_probs[" + std::to_string(c) + "]");
        if (probs[c] < 0.0 || probs[c] > 1.0) fail(path + ".class_probs", "probability outside [0,1]");
      }
      inst.class_probs = probs;
    }
    const json& pts = member(j, "points", path);
    if (!pts.is_array()) fail(path + ".points", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = path + ".points[" + std::to_string(i) + "]";
      if (!pts[i].is_array() || pts[i].size() != 2) fail(pp, "expected [x, y]");
      inst.points.push_back({number(pts[i][0], pp + "[0]"), number(pts[i][1], pp + "[1]")});
    }
    if (inst.points.size() < 2) fail(path + ".points", "an instance needs at least 2 points");
    return inst;
  }

 private:
  std::string source_;
};

json pose_json(const Pose2& p) { return {{"x", p.x}, {"y", p.y}, {"yaw", p.yaw}}; }

}  // namespace

ParseError::ParseError(std::string file, int line, std::string field, const std::string& what)
    : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (field.empty() ? std::string() : ": field '" + field + "'") + ": " + what),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

std::vector<LocalVectorMap> parse_maps(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of_byte(text, e.byte), "", e.what());
  }
  const Reader r(source);
  const json& version = r.member(doc, "version", "$");
  if (!version.is_number_integer() || version.get<int>() != kMapFormatVersion) {
    r.fail("$.version", "unsupported version (expected " + std::to_string(kMapFormatVersion) + ")");
  }
  const json& frames = r.member(doc, "frames", "$");
  if (!frames.is_array()) r.fail("$.frames", "expected an array");

  std::vector<LocalVectorMap> out;
  out.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string fp = "$.frames[" + std::to_string(f) + "]";
    const json& fj = frames[f];
    LocalVectorMap m;
    const json& id = r.member(fj, "frame_id", fp);
    if (!id.is_number_integer()) r.fail(fp + ".frame_id", "expected an integer");
    m.frame_id = id.get<std::int64_t>();
    m.timestamp = fj.contains("timestamp") ? r.number(fj["timestamp"], fp + ".timestamp") : 0.0;
    m.ego_pose = r.pose(r.member(fj, "ego_pose", fp), fp + ".ego_pose");
    const json& insts = r.member(fj, "instances", fp);
    if (!insts.is_array()) r.fail(fp + ".instances", "expected an array");
    for (std::size_t i = 0; i < insts.size(); ++i) {
      m.instances.push_back(r.instance(insts[i], fp + ".instances[" + std::to_string(i) + "]"));
    }
    for (const auto& prev : out) {
      if (prev.frame_id == m.frame_id) r.fail(fp + ".frame_id", "duplicate frame id");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string dump_maps(const std::vector<LocalVectorMap>& frames) {
  json jf = json::array();
  for (const LocalVectorMap& m : frames) {
    json insts = json::array();
    for (const PolyInstance& inst : m.instances) {
      json ji;
      ji["category"] = std::string(to_string(inst.category));
      ji["closed"] = inst.closed;
      if (inst.score) ji["score"] = *inst.score;
      if (inst.class_probs) ji["class_probs"] = *inst.class_probs;
      json pts = json::array();
      for (const Vec2& p : inst.points) pts.push_back({p.x, p.y});
      ji["points"] = std::move(pts);
      insts.push_back(std::move(ji));
    }
    jf.push_back({{"frame_id", m.frame_id},
                  {"timestamp", m.timestamp},
                  {"ego_pose", pose_json(m.ego_pose)},
                  {"instances", std::move(insts)}});
  }
  json doc{{"version", kMapFormatVersion}, {"frames", std::move(jf)}};
  return doc.dump(1) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::vector<LocalVectorMap> read_maps(const std::filesystem::path& path) {
  return parse_maps(read_file(path), path.string());
}

void write_maps(const std::filesystem::path& path, const std::vector<LocalVectorMap>& frames) {
  write_file_atomic(path, dump_maps(frames));
}

std::string grid_to_pgm(const GridMap& grid) {
  const GridGeometry& g = grid.geometry;
  std::string out = "P2\n" + std::to_string(g.width) + " " + std::to_string(g.height) + "\n255\n";
  out.reserve(out.size() + g.cells() * 4);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const long v = std::lround(std::clamp(grid.at(col, row), 0.0, 1.0) * 255.0);
      if (col > 0) out += ' ';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

std::string grid_sidecar(const GridMap& grid, const Pose2& pose) {
  const GridGeometry& g = grid.geometry;
  json j{{"resolution", g.resolution},
         {"width", g.width},
         {"height", g.height},
         {"extent", {{"x_min", g.x_min}, {"x_max", g.x_max()}, {"y_min", g.y_min}, {"y_max", g.y_max()}}},
         {"pose", pose_json(pose)}};
  return j.dump(1) + "\n";
}

void write_grid(const std::filesystem::path& path, const GridMap& grid, const Pose2& pose) {
  std::filesystem::path side = path;
  side += ".json";
  write_file_atomic(side, grid_sidecar(grid, pose));
  write_file_atomic(path, grid_to_pgm(grid));
}

GridFile read_grid(const std::filesystem::path& path) {
  std::filesystem::path side = path;
  side += ".json";
  const std::string side_text = read_file(side);
  json sj;
  try {
    sj = json::parse(side_text);
  } catch (const json::parse_error& e) {
    throw ParseError(side.string(), line_of_byte(side_text, e.byte), "", e.what());
  }
  const Reader r(side.string());
  GridFile gf;
  GridGeometry g;
  g.resolution = r.number(r.member(sj, "resolution", "$"), "$.resolution");
  const json& ext = r.member(sj, "extent", "$");
  g.x_min = r.number(r.member(ext, "x_min", "$.extent"), "$.extent.x_min");
  g.y_min = r.number(r.member(ext, "y_min", "$.extent"), "$.extent.y_min");
  gf.pose = r.pose(r.member(sj, "pose", "$"), "$.pose");

  std::istringstream in(read_file(path));
  std::string magic;
  int maxval = 0;
  in >> magic >> g.width >> g.height >> maxval;
  if (!in || magic != "P2" || maxval <= 0) throw ParseError(path.string(), 1, "header", "expected a P2 graymap header");
  try {
    g.validate();
  } catch (const InvalidConfig& e) {
    throw ParseError(path.string(), 2, "size", e.what());
  }
  gf.grid = GridMap(g);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      int v = 0;
      if (!(in >> v) || v < 0 || v > maxval) {
        throw ParseError(path.string(), row + 4, "pixel", "missing or invalid pixel value");
      }
      gf.grid.at(col, row) = static_cast<double>(v) / maxval;
    }
  }
  return gf;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << std::left << std::setw(14) << "category";
  for (double t : report.thresholds) {
    std::ostringstream h;
    h << std::fixed << std::setprecision(1) << "AP@" << t;
    os << std::right << std::setw(9) << h.str();
  }
  os << std::right << std::setw(9) << "AP" << std::setw(7) << "GT" << std::setw(7) << "pred" << "\n";
  for (Category cat : kAllCategories) {
    const int c = index_of(cat);
    os << std::left << std::setw(14) << to_string(cat);
    for (double ap : report.ap[c]) os << std::right << std::setw(9) << ap;
    os << std::right << std::setw(9) << report.category_ap[c] << std::setw(7) << report.n_gt[c] << std::setw(7)
       << report.n_pred[c] << "\n";
  }
  os << "mAP " << report.map << "  (frames " << report.frames << ", " << report.pooling << ")\n";
  return os.str();
}

std::string report_to_json(const EvalReport& report) {
  json per_cat = json::object();
  for (Category cat : kAllCategories) {
    const int c = index_of(cat);
    json counts = json::array();
    for (const EvalCounts& k : report.counts[c]) counts.push_back({{"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn}});
    per_cat[std::string(to_string(cat))] = {{"ap", report.ap[c]},
                                            {"mean_ap", report.category_ap[c]},
                                            {"n_gt", report.n_gt[c]},
                                            {"n_pred", report.n_pred[c]},
                                            {"counts", std::move(counts)}};
  }
  json j{{"thresholds", report.thresholds},
         {"categories", std::move(per_cat)},
         {"mAP", report.map},
         {"frames", report.frames},
         {"pooling", report.pooling},
         {"undefined_ap", report.diagnostics.undefined_ap}};
  return j.dump(1) + "\n";
}

}  // namespace vecmap::io
