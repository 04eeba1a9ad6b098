#pragma once

#include <string>
#include <vector>

namespace pushgate {

/// Schema version written in the first line of every CSV file.
inline constexpr int kCsvVersion = 1;

/// %.17g: round-trips every double.
std::string format_double(double v);

/// Buffered CSV table. The first line is "# pushgate <kind> v<version>",
/// then the column header.
class CsvTable {
 public:
  CsvTable(std::string kind, std::vector<std::string> columns);

  CsvTable& add_row(const std::vector<std::string>& cells);
  CsvTable& add_row(const std::vector<double>& values);

  std::size_t columns() const { return columns_.size(); }
  std::string str() const;
  /// Writes str() to `path`; throws std::runtime_error on I/O failure.
  void write(const std::string& path) const;

 private:
  std::string kind_;
  std::vector<std::string> columns_;
  std::vector<std::string> lines_;
};

}  // namespace pushgate
