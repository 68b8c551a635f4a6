#include "ballast/core/csv.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include "ballast/error.hpp"

namespace ballast {

CsvTable parse_csv(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    // A line holding nothing at all is skipped rather than read as one empty cell.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field near line " + std::to_string(line));
  if (!field.empty() || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw DataError("no header");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw DataError("ragged row " + std::to_string(r + 1) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return parse_csv(in);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

Dataset dataset_from_table(const CsvTable& table, const CsvLoadOptions& options) {
  std::set<std::string> seen;
  for (const auto& name : table.header) {
    if (!seen.insert(name).second) throw DataError("duplicate header name '" + name + "'");
  }
  for (const auto& [name, kind] : options.schema) {
    if (!seen.count(name)) throw DataError("schema override for unknown column '" + name + "'");
  }

  const std::size_t n = table.rows.size();
  std::vector<FeatureColumn> columns;
  columns.reserve(table.header.size());
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    std::vector<std::string> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = table.rows[i][j];
    std::optional<ColumnKind> forced;
    if (auto it = options.schema.find(table.header[j]); it != options.schema.end()) {
      forced = it->second;
    }
    columns.push_back(infer_column(table.header[j], cells, forced));
  }
  Dataset data(std::move(columns), n);
  if (options.target) return data.with_target(*options.target, options.target_kind);
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
  return dataset_from_table(read_csv_file(path), options);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  std::vector<std::string> header = data.feature_names();
  const auto& target = data.target();
  if (target) header.push_back(target->name);
  write_csv_row(out, header);

  std::vector<std::string> row(header.size());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < data.n_features(); ++j) row[j] = data.column(j).cell_string(i);
    if (target) {
      const double v = target->values[i];
      row.back() = target->kind == TargetKind::Classification
                       ? target->class_labels[static_cast<std::size_t>(v)]
                       : format_number(v);
    }
    write_csv_row(out, row);
  }
}

}  // namespace ballast
