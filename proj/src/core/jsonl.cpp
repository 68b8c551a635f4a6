#include "ballast/core/jsonl.hpp"

#include <fstream>
#include <istream>
#include <unordered_map>

#include <json.hpp>

#include "ballast/error.hpp"

namespace ballast {

namespace {

using json = nlohmann::ordered_json;

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

struct Flattener {
  ListPolicy policy;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<std::string>> cells;  // per column, per record
  std::vector<std::uint8_t> list_column;
  std::size_t n_records = 0;

  std::size_t column(const std::string& name) {
    auto [it, inserted] = slot.emplace(name, order.size());
    if (inserted) {
      order.push_back(name);
      cells.emplace_back(n_records);
      list_column.push_back(0);
    }
    return it->second;
  }

  void put(const std::string& name, std::string value, bool from_list) {
    const auto j = column(name);
    cells[j].back() = std::move(value);
    if (from_list) list_column[j] = 1;
  }

  void visit(const std::string& prefix, const json& v) {
    if (v.is_object()) {
      for (const auto& [key, child] : v.items()) {
        visit(prefix.empty() ? key : prefix + "." + key, child);
      }
      return;
    }
    if (v.is_null()) {
      column(prefix);  // registers the key so column order is stable
      return;
    }
    if (v.is_array()) {
      switch (policy) {
        case ListPolicy::Drop:
          return;
        case ListPolicy::Count:
          put(prefix, std::to_string(v.size()), false);
          return;
        case ListPolicy::JoinTokens: {
          std::string joined;
          for (const auto& e : v) {
            if (e.is_null()) continue;
            if (!joined.empty()) joined.push_back(' ');
            joined += scalar_text(e);
          }
          put(prefix, std::move(joined), true);
          return;
        }
      }
    }
    put(prefix, scalar_text(v), false);
  }

  void add_record(const json& record) {
    ++n_records;
    for (auto& c : cells) c.emplace_back();
    visit("", record);
  }
};

}  // namespace

std::optional<ListPolicy> parse_list_policy(std::string_view token) {
  if (token == "join_tokens") return ListPolicy::JoinTokens;
  if (token == "count") return ListPolicy::Count;
  if (token == "drop") return ListPolicy::Drop;
  return std::nullopt;
}

JsonlLoadResult flatten_jsonl(std::istream& in, const JsonlOptions& options) {
  Flattener flat{options.list_policy, {}, {}, {}, {}, 0};
  std::vector<std::string> warnings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    std::string problem;
    try {
      record = json::parse(line);
      if (!record.is_object()) problem = "record is not a JSON object";
    } catch (const nlohmann::json::parse_error& e) {
      problem = e.what();
    }
    if (!problem.empty()) {
      const std::string msg = "malformed JSONL line " + std::to_string(line_no) + ": " + problem;
      if (!options.skip_malformed) throw DataError(msg);
      warnings.push_back(msg);
      continue;
    }
    flat.add_record(record);
  }
  if (flat.n_records == 0) throw DataError("no records");

  // Cells never written (absent keys, nulls) are empty and load as missing.
  std::vector<FeatureColumn> columns;
  columns.reserve(flat.order.size());
  for (std::size_t j = 0; j < flat.order.size(); ++j) {
    auto& raw = flat.cells[j];
    std::optional<ColumnKind> forced;
    if (flat.list_column[j]) forced = ColumnKind::Text;
    columns.push_back(infer_column(flat.order[j], raw, forced));
  }
  Dataset data(std::move(columns), flat.n_records);
  if (options.target) data = data.with_target(*options.target, options.target_kind);
  return {std::move(data), std::move(warnings)};
}

JsonlLoadResult flatten_jsonl(const std::filesystem::path& path, const JsonlOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return flatten_jsonl(in, options);
}

}  // namespace ballast
