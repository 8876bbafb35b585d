#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvg {

/// Numeric CSV table: one header row, `#` comment lines kept verbatim.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
  std::vector<double> column_values(std::size_t col) const;
};

/// Throws std::runtime_error on a missing header, ragged rows, or non-numeric cells.
CsvTable read_csv(std::istream& is);

}  // namespace tvg
