#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vecmap/core.hpp"
#include "vecmap/eval.hpp"

namespace vecmap::io {

inline constexpr int kMapFormatVersion = 1;

/// Malformed input file. `line` is 0 when the position is unknown (schema
/// errors are reported by JSON path in `field`).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, std::string field, const std::string& what);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  int line_;
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<LocalVectorMap> parse_maps(const std::string& text, const std::string& source = "<memory>");
std::string dump_maps(const std::vector<LocalVectorMap>& frames);

std::vector<LocalVectorMap> read_maps(const std::filesystem::path& path);
void write_maps(const std::filesystem::path& path, const std::vector<LocalVectorMap>& frames);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Grid file: ASCII graymap (P2), row 0 (y_min) first, values scaled to
/// 0-255, plus a JSON sidecar `<path>.json` holding resolution, extent, pose.
std::string grid_to_pgm(const GridMap& grid);
std::string grid_sidecar(const GridMap& grid, const Pose2& pose);
void write_grid(const std::filesystem::path& path, const GridMap& grid, const Pose2& pose);

struct GridFile {
  GridMap grid;
  Pose2 pose;
};
GridFile read_grid(const std::filesystem::path& path);

/// Human-readable AP table.
std::string format_report(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace vecmap::io
