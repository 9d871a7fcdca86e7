#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cesarolab {

/// A named numeric table plus string metadata. The first column is the
/// index and must be non-decreasing; every value must be finite.
struct SeriesReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> meta;

  SeriesReport() = default;
  SeriesReport(std::string name, std::vector<std::string> columns);

  void add_row(std::vector<double> row);
  void set(const std::string& key, const std::string& value) { meta[key] = value; }
  void set(const std::string& key, const char* value) { meta[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);

  std::size_t column_index(const std::string& column) const;
  std::vector<double> column(const std::string& column) const;
  double at(std::size_t row, const std::string& column) const;

  /// Throws ErrorCode::domain naming the offending row/column.
  void validate() const;
};

/// "%.17g": round-trips every double.
std::string format_double(double v);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct CsvStamp {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Line 1: "# cesarolab v1, config=<hash>, seed=<seed>"; line 2: header;
/// then one row per line. Output bytes depend only on the inputs.
void write_csv(const SeriesReport& report, const std::filesystem::path& path,
               const CsvStamp& stamp);
std::string to_csv(const SeriesReport& report, const CsvStamp& stamp);

/// Metadata sidecar: {"name":..., "columns":[...], "meta":{...}}.
void write_meta_json(const SeriesReport& report, const std::filesystem::path& path);

}  // namespace cesarolab
