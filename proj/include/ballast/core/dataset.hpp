#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ballast {

enum class ColumnKind { Numeric, Categorical, Text };

std::string_view to_string(ColumnKind kind);
std::optional<ColumnKind> parse_column_kind(std::string_view token);

// One feature of a table. Exactly one of the value arrays is populated,
// selected by `kind`:
//   Numeric     -> numeric (value undefined where missing)
//   Categorical -> codes into `levels` (-1 where missing)
//   Text        -> text (empty where missing)
struct FeatureColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numeric;
  std::vector<std::int32_t> codes;
  std::vector<std::string> levels;
  std::vector<std::string> text;
  std::vector<std::uint8_t> missing;

  std::size_t size() const noexcept { return missing.size(); }
  bool is_missing(std::size_t row) const { return missing[row] != 0; }
  std::size_t missing_count() const;

  // Cell rendered back to text; empty for missing cells.
  std::string cell_string(std::size_t row) const;

  static FeatureColumn make_numeric(std::string name, std::vector<double> values,
                                    std::vector<std::uint8_t> missing = {});
  static FeatureColumn make_categorical(std::string name,
                                        const std::vector<std::string>& cells,
                                        std::vector<std::uint8_t> missing = {});
  static FeatureColumn make_text(std::string name, std::vector<std::string> cells,
                                 std::vector<std::uint8_t> missing = {});
};

enum class TargetKind { Classification, Regression };

// Classification targets hold class codes 0..C-1 in `values`, with the
// original label text in `class_labels`.
struct Target {
  std::string name;
  TargetKind kind = TargetKind::Classification;
  std::vector<double> values;
  std::vector<std::string> class_labels;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t class_count() const noexcept { return class_labels.size(); }
  std::vector<std::int32_t> class_codes() const;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<FeatureColumn> columns, std::size_t n_rows,
          std::optional<Target> target = std::nullopt);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_features() const noexcept { return columns_.size(); }
  const std::vector<FeatureColumn>& columns() const noexcept { return columns_; }
  const FeatureColumn& column(std::size_t j) const { return columns_.at(j); }
  const FeatureColumn& column(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> feature_names() const;

  const std::optional<Target>& target() const noexcept { return target_; }
  bool has_target() const noexcept { return target_.has_value(); }

  // Subset of columns, in the given order; the target is carried along.
  Dataset select(std::span<const std::size_t> indices) const;

  // Removes the named column from the features and turns it into the target.
  Dataset with_target(std::string_view column_name,
                      std::optional<TargetKind> kind = std::nullopt) const;

 private:
  std::vector<FeatureColumn> columns_;
  std::size_t n_rows_ = 0;
  std::optional<Target> target_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Tokens treated as missing regardless of column kind.
bool is_missing_token(std::string_view cell);

// Strict number parse: surrounding whitespace allowed, value must be finite.
std::optional<double> parse_number(std::string_view cell);

// Shortest round-trip rendering of a double.
std::string format_number(double value);

// Column-kind inference shared by the CSV and JSONL loaders. A column is
// numeric when at least `numeric_fraction` of its non-missing cells parse as
// numbers; the stray cells are then coerced to missing.
FeatureColumn infer_column(std::string name, const std::vector<std::string>& cells,
                           std::optional<ColumnKind> forced = std::nullopt,
                           double numeric_fraction = 0.9);

}  // namespace ballast
