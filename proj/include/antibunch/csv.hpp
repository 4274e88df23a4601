#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace antibunch {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

/// 17 significant digits; non-finite values are written as nan.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace antibunch
