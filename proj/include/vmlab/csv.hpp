#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vmlab {

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);

/// Column-oriented CSV table with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& data() const { return rows_; }

  std::string str() const;
  /// Throws Errc::io on failure.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Reads a numeric CSV with a header line. Throws Errc::io on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace vmlab
