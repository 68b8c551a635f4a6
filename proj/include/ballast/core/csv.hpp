#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ballast/core/dataset.hpp"

namespace ballast {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Throws DataError on unterminated quotes or ragged rows.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvLoadOptions {
  std::map<std::string, ColumnKind> schema;  // per-column kind overrides
  std::optional<std::string> target;         // column moved into Dataset::target
  std::optional<TargetKind> target_kind;
};

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options = {});
Dataset dataset_from_table(const CsvTable& table, const CsvLoadOptions& options = {});

// Writes features (and the target, when present, as the last column).
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace ballast
