#include "pushgate/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pushgate {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::string kind, std::vector<std::string> columns)
    : kind_(std::move(kind)), columns_(std::move(columns)) {}

CsvTable& CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    throw std::logic_error("CsvTable: row width does not match header for " + kind_);
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  lines_.push_back(std::move(line));
  return *this;
}

CsvTable& CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return add_row(cells);
}

std::string CsvTable::str() const {
  std::string out = "# pushgate " + kind_ + " v" + std::to_string(kCsvVersion) + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << str();
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace pushgate
