#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "antibunch/beamsplitter.hpp"

namespace antibunch {

using Params = std::map<std::string, double>;
using Objective = std::function<OutputStats(const Params&)>;

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  /// Throws ConfigError unless count >= 2 and min < max, or count == 1 and min == max.
  void validate() const;
  double value(int i) const;
  std::vector<double> values() const;
};

struct SweepSpec {
  std::vector<Axis> axes;
  std::string objective;
  Params fixed;

  void validate() const;
  std::size_t cell_count() const;
};

enum class CellStatus { ok, undefined, failed };

struct Cell {
  double g2 = 0.0;
  double n_mean = 0.0;
  CellStatus status = CellStatus::failed;
  std::string message;
};

struct SweepResult {
  std::vector<Axis> axes;
  /// Row-major over axes: the last axis varies fastest.
  std::vector<Cell> cells;
  Params argmin;
  double min_value = 0.0;
  bool has_min = false;
  std::size_t undefined_cells = 0;
  std::size_t failed_cells = 0;

  Params params_at(std::size_t index) const;
};

/// Evaluates the objective on the Cartesian grid, in parallel. Identical input
/// gives bit-identical output regardless of thread count.
SweepResult sweep(const SweepSpec& spec, const Objective& objective, unsigned threads = 0);

struct RefineOptions {
  double step_tol = 1e-5;
  double value_tol = 1e-10;
  int max_iterations = 4000;
  double initial_step = 0.05;  // fraction of each bound width
};

struct RefineResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string warning;
};

/// Bounded Nelder-Mead from start. The result is never worse than start.
RefineResult refine_min(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& start, const std::vector<double>& lower,
                        const std::vector<double>& upper, const RefineOptions& options = {});

struct ParamRefinement {
  Params argmin;
  OutputStats stats{};
  RefineResult detail;
};

/// refine_min over the named axes (their min/max as bounds), other parameters from base.
ParamRefinement refine_params(const Objective& objective, const Params& base,
                              const std::vector<Axis>& free_axes, const RefineOptions& options = {});

/// Indices of grid cells with no lower defined neighbour along any axis, lowest first.
std::vector<std::size_t> grid_local_minima(const SweepResult& grid, std::size_t max_count);

/// refine_params from each of the lowest `starts` grid local minima; keeps the best.
/// Valleys narrower than the grid spacing can hide the global minimum from the grid argmin.
ParamRefinement refine_from_grid(const Objective& objective, const SweepResult& grid,
                                 const RefineOptions& options = {}, std::size_t starts = 4);

struct CurvePoint {
  double scan_value = 0.0;
  double g2 = 0.0;
  double n_mean = 0.0;
  Params argmin;
  bool defined = false;
};

/// For each scan value: coarse inner sweep, then refinement from the grid argmin.
std::vector<CurvePoint> min_curve(const Objective& objective, const Axis& scan,
                                  const std::vector<Axis>& inner, const Params& fixed,
                                  const RefineOptions& options = {});

struct Derivatives {
  std::vector<double> gradient;
  std::vector<double> second;
};

/// Central differences of g2 with step h in each named parameter.
Derivatives finite_differences(const Objective& objective, const Params& at,
                               const std::vector<std::string>& names, double h = 1e-4);

}  // namespace antibunch
