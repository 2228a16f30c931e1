#include "vmlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vmlab/error.hpp"

namespace vmlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw Error(Errc::invalid_argument, "CsvTable needs at least one column");
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw Error(Errc::alignment, "CsvTable row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t j = 0; j < header_.size(); ++j) {
    if (j) out += ',';
    out += header_[j];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  os << str();
  if (!os) throw Error(Errc::io, "write failed: " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::io, path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::io, path.string() + ": empty file");
  CsvTable table(split(line));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header().size()) {
      throw Error(Errc::io, path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path, lineno));
    table.add_row(row);
  }
  return table;
}

}  // namespace vmlab
