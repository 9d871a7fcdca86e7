#include "cesarolab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cesarolab/common.hpp"

namespace cesarolab {

// SeriesReport

SeriesReport::SeriesReport(std::string n, std::vector<std::string> cols)
    : name(std::move(n)), columns(std::move(cols)) {}

void SeriesReport::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    fail(ErrorCode::domain, "report '" + name + "': row has " + std::to_string(row.size()) +
                                " values for " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

void SeriesReport::set(const std::string& key, double value) { meta[key] = format_double(value); }

void SeriesReport::set(const std::string& key, std::uint64_t value) {
  meta[key] = std::to_string(value);
}

std::size_t SeriesReport::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return i;
  fail(ErrorCode::domain, "report '" + name + "' has no column '" + column + "'");
}

std::vector<double> SeriesReport::column(const std::string& c) const {
  const std::size_t idx = column_index(c);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

double SeriesReport::at(std::size_t row, const std::string& c) const {
  return rows.at(row)[column_index(c)];
}

void SeriesReport::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (!std::isfinite(rows[r][c]))
        fail(ErrorCode::domain, "report '" + name + "': non-finite value at row " +
                                    std::to_string(r) + ", column '" + columns[c] + "'");
    if (r > 0 && rows[r][0] < rows[r - 1][0])
      fail(ErrorCode::domain, "report '" + name + "': index column decreases at row " +
                                  std::to_string(r));
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv(const SeriesReport& report, const CsvStamp& stamp) {
  report.validate();
  std::string out = "# cesarolab v1, config=" + stamp.config_hash +
                    ", seed=" + std::to_string(stamp.seed) + "\n";
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c) out += ',';
    out += report.columns[c];
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const SeriesReport& report, const std::filesystem::path& path,
               const CsvStamp& stamp) {
  const std::string text = to_csv(report, stamp);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

void write_meta_json(const SeriesReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["name"] = report.name;
  j["columns"] = report.columns;
  j["meta"] = report.meta;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  f << j.dump(2) << '\n';
  if (!f) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

}  // namespace cesarolab
