#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace vecmap {

/// Central differences of `f` around `x` (restored on return).
std::vector<double> central_differences(const std::function<double()>& f, std::span<double* const> coords,
                                        double h);

/// ||a - b|| / max(||a||, ||b||); 0 when both vectors vanish.
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

struct GradCheckConfig {
  std::uint64_t seed = 0;
  int contrastive_cases = 50;
  int mo_cases = 20;
  int dim = 8;
  int grid_width = 12;
  int grid_height = 10;
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Cells within this distance of an L1 kink are left out of the comparison.
  double tie_margin = 1e-3;
  /// Negative control: perturb the analytic gradients by 1%.
  bool inject_error = false;
};

struct GradCheckReport {
  int contrastive_cases = 0;
  int mo_cases = 0;
  double max_rel_err_contrastive = 0.0;
  double max_rel_err_mo = 0.0;
  int excluded_cells = 0;
  bool passed = false;
};

GradCheckReport run_gradcheck(const GradCheckConfig& cfg = {});

}  // namespace vecmap
