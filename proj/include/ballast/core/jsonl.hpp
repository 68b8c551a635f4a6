#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ballast/core/dataset.hpp"

namespace ballast {

// How list-valued JSON fields become cells.
enum class ListPolicy {
  JoinTokens,  // scalar elements joined by spaces into a text cell
  Count,       // element count as a numeric cell
  Drop,        // field omitted
};

std::optional<ListPolicy> parse_list_policy(std::string_view token);

struct JsonlOptions {
  ListPolicy list_policy = ListPolicy::JoinTokens;
  bool skip_malformed = false;
  std::optional<std::string> target;
  std::optional<TargetKind> target_kind;
};

struct JsonlLoadResult {
  Dataset data;
  std::vector<std::string> warnings;  // one per skipped malformed line
};

// Nested objects flatten to dotted column names in first-appearance order;
// keys absent from a record give missing cells.
JsonlLoadResult flatten_jsonl(std::istream& in, const JsonlOptions& options = {});
JsonlLoadResult flatten_jsonl(const std::filesystem::path& path, const JsonlOptions& options = {});

}  // namespace ballast
