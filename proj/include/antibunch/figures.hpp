#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "antibunch/config.hpp"
#include "antibunch/csv.hpp"

namespace antibunch {

std::vector<std::string> figure_names();

/// Default objective, axes, scan and pinned parameters of a figure.
RunConfig figure_defaults(const std::string& name);

/// Defaults overridden by a user config. Axes and scan replace the defaults,
/// parameters merge key by key, dynamics replaces the whole block.
RunConfig merge_figure_config(const std::string& name, const RunConfig& overrides);

struct FigureResult {
  std::string name;
  CsvTable table;
  json meta;
};

/// Computes a figure from a fully merged config.
FigureResult run_figure(const RunConfig& config);

/// Writes <name>.csv and <name>.meta.json into dir.
void write_figure(const FigureResult& result, const std::filesystem::path& dir);

}  // namespace antibunch
