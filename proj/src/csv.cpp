#include "antibunch/csv.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "antibunch/errors.hpp"

namespace antibunch {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw Error("csv: no column named '" + name + "'");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("csv: cannot write '" + path.string() + "'");
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw Error("csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw Error("csv: write failed for '" + path.string() + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv: cannot read '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: missing header");
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      if (cell == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw Error("csv: malformed number '" + cell + "'");
    }
    if (row.size() != t.columns.size()) throw Error("csv: row width does not match header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace antibunch
