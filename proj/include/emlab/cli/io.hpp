#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace emlab::cli {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws Error(Io) if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(std::size_t column) const;
};

/// Header row then one row per sample, values printed with %.17g so they
/// read back bit-exact.
void write_csv(const std::filesystem::path& path, const Table& table);
std::string format_csv(const Table& table);

/// Throws Error(Io) with the offending line for ragged rows, empty files or
/// non-numeric cells. "nan" and "inf" are accepted.
Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text, const std::string& source = "<string>");

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace emlab::cli
