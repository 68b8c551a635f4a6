#include "ballast/core/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "ballast/error.hpp"

namespace ballast {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::uint8_t> resolve_mask(std::vector<std::uint8_t> mask, std::size_t n) {
  if (mask.empty()) return std::vector<std::uint8_t>(n, 0);
  if (mask.size() != n) throw DataError("missing mask length does not match column length");
  return mask;
}

// Classification targets with more distinct numeric values than this are
// treated as regression targets.
constexpr std::size_t kMaxNumericClasses = 20;

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Text: return "text";
  }
  return "numeric";
}

std::optional<ColumnKind> parse_column_kind(std::string_view token) {
  if (token == "numeric") return ColumnKind::Numeric;
  if (token == "categorical") return ColumnKind::Categorical;
  if (token == "text") return ColumnKind::Text;
  return std::nullopt;
}

bool is_missing_token(std::string_view cell) {
  static constexpr std::array<std::string_view, 9> kTokens = {
      "", "NA", "N/A", "NaN", "nan", "null", "NULL", "None", "?"};
  const auto t = trim(cell);
  return std::find(kTokens.begin(), kTokens.end(), t) != kTokens.end();
}

std::optional<double> parse_number(std::string_view cell) {
  auto t = trim(cell);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

// ---------------------------------------------------------------------------
// FeatureColumn

std::size_t FeatureColumn::missing_count() const {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), 1));
}

std::string FeatureColumn::cell_string(std::size_t row) const {
  if (is_missing(row)) return {};
  switch (kind) {
    case ColumnKind::Numeric: return format_number(numeric[row]);
    case ColumnKind::Categorical: return levels[static_cast<std::size_t>(codes[row])];
    case ColumnKind::Text: return text[row];
  }
  return {};
}

FeatureColumn FeatureColumn::make_numeric(std::string name, std::vector<double> values,
                                          std::vector<std::uint8_t> missing) {
  FeatureColumn col;
  col.name = std::move(name);
  col.kind = ColumnKind::Numeric;
  col.missing = resolve_mask(std::move(missing), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (col.missing[i]) {
      values[i] = 0.0;
    } else if (!std::isfinite(values[i])) {
      throw DataError("column '" + col.name + "' has a non-finite value at row " +
                      std::to_string(i));
    }
  }
  col.numeric = std::move(values);
  return col;
}

FeatureColumn FeatureColumn::make_categorical(std::string name,
                                              const std::vector<std::string>& cells,
                                              std::vector<std::uint8_t> missing) {
  FeatureColumn col;
  col.name = std::move(name);
  col.kind = ColumnKind::Categorical;
  col.missing = resolve_mask(std::move(missing), cells.size());
  col.codes.assign(cells.size(), -1);
  std::unordered_map<std::string, std::int32_t> lookup;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (col.missing[i]) continue;
    auto [it, inserted] =
        lookup.emplace(cells[i], static_cast<std::int32_t>(col.levels.size()));
    if (inserted) col.levels.push_back(cells[i]);
    col.codes[i] = it->second;
  }
  return col;
}

FeatureColumn FeatureColumn::make_text(std::string name, std::vector<std::string> cells,
                                       std::vector<std::uint8_t> missing) {
  FeatureColumn col;
  col.name = std::move(name);
  col.kind = ColumnKind::Text;
  col.missing = resolve_mask(std::move(missing), cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (col.missing[i]) cells[i].clear();
  }
  col.text = std::move(cells);
  return col;
}

FeatureColumn infer_column(std::string name, const std::vector<std::string>& cells,
                           std::optional<ColumnKind> forced, double numeric_fraction) {
  const std::size_t n = cells.size();
  std::vector<std::uint8_t> missing(n, 0);
  std::vector<double> parsed(n, 0.0);
  std::vector<std::uint8_t> parse_ok(n, 0);
  std::size_t present = 0;
  std::size_t numeric = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_missing_token(cells[i])) {
      missing[i] = 1;
      continue;
    }
    ++present;
    if (auto v = parse_number(cells[i])) {
      parsed[i] = *v;
      parse_ok[i] = 1;
      ++numeric;
    }
  }

  ColumnKind kind = ColumnKind::Categorical;
  if (forced) {
    kind = *forced;
  } else if (present > 0 &&
             static_cast<double>(numeric) >= numeric_fraction * static_cast<double>(present)) {
    kind = ColumnKind::Numeric;
  }

  switch (kind) {
    case ColumnKind::Numeric:
      for (std::size_t i = 0; i < n; ++i) {
        if (!missing[i] && !parse_ok[i]) missing[i] = 1;
      }
      return FeatureColumn::make_numeric(std::move(name), std::move(parsed), std::move(missing));
    case ColumnKind::Categorical: {
      std::vector<std::string> trimmed(n);
      for (std::size_t i = 0; i < n; ++i) trimmed[i] = std::string(trim(cells[i]));
      return FeatureColumn::make_categorical(std::move(name), trimmed, std::move(missing));
    }
    case ColumnKind::Text:
      return FeatureColumn::make_text(std::move(name), cells, std::move(missing));
  }
  return {};
}

// ---------------------------------------------------------------------------
// Target

std::vector<std::int32_t> Target::class_codes() const {
  std::vector<std::int32_t> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](double v) { return static_cast<std::int32_t>(v); });
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<FeatureColumn> columns, std::size_t n_rows,
                 std::optional<Target> target)
    : columns_(std::move(columns)), n_rows_(n_rows), target_(std::move(target)) {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& col = columns_[j];
    if (col.size() != n_rows_) {
      throw DataError("column '" + col.name + "' has " + std::to_string(col.size()) +
                      " rows, expected " + std::to_string(n_rows_));
    }
    if (!index_.emplace(col.name, j).second) {
      throw DataError("duplicate feature name '" + col.name + "'");
    }
  }
  if (target_ && target_->size() != n_rows_) {
    throw DataError("target length does not match row count");
  }
}

const FeatureColumn& Dataset::column(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw DataError("unknown feature '" + std::string(name) + "'");
  return columns_[*idx];
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  std::vector<FeatureColumn> cols;
  cols.reserve(indices.size());
  for (auto j : indices) cols.push_back(columns_.at(j));
  return Dataset(std::move(cols), n_rows_, target_);
}

Dataset Dataset::with_target(std::string_view column_name,
                             std::optional<TargetKind> kind) const {
  auto idx = index_of(column_name);
  if (!idx) throw DataError("target column '" + std::string(column_name) + "' not found");
  const auto& col = columns_[*idx];
  if (col.missing_count() > 0) {
    throw DataError("target column '" + col.name + "' has missing cells");
  }

  Target target;
  target.name = col.name;
  if (col.kind == ColumnKind::Numeric) {
    std::set<double> distinct(col.numeric.begin(), col.numeric.end());
    const bool integral = std::all_of(distinct.begin(), distinct.end(),
                                      [](double v) { return v == std::floor(v); });
    TargetKind resolved = kind.value_or(
        integral && distinct.size() <= kMaxNumericClasses ? TargetKind::Classification
                                                          : TargetKind::Regression);
    target.kind = resolved;
    if (resolved == TargetKind::Regression) {
      target.values = col.numeric;
    } else {
      std::map<double, double> code;
      for (double v : distinct) {
        code.emplace(v, static_cast<double>(code.size()));
        target.class_labels.push_back(format_number(v));
      }
      target.values.reserve(n_rows_);
      for (double v : col.numeric) target.values.push_back(code.at(v));
    }
  } else {
    if (kind == TargetKind::Regression) {
      throw DataError("non-numeric column '" + col.name + "' cannot be a regression target");
    }
    // Class codes follow sorted label order so they do not depend on row order.
    std::vector<std::string> labels;
    std::vector<std::string> cells(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) cells[i] = col.cell_string(i);
    labels = cells;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    target.kind = TargetKind::Classification;
    target.class_labels = labels;
    target.values.reserve(n_rows_);
    for (const auto& c : cells) {
      auto it = std::lower_bound(labels.begin(), labels.end(), c);
      target.values.push_back(static_cast<double>(it - labels.begin()));
    }
  }

  std::vector<FeatureColumn> rest;
  rest.reserve(columns_.size() - 1);
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (j != *idx) rest.push_back(columns_[j]);
  }
  return Dataset(std::move(rest), n_rows_, std::move(target));
}

}  // namespace ballast
