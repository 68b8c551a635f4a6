#include "ballast/text/regex.hpp"

#include "ballast/error.hpp"

namespace ballast::text {

const std::vector<std::string>& default_ballast_patterns() {
  static const std::vector<std::string> patterns = {
      R"(all rights reserved)",
      R"(copyright|\(c\)\s*\d{4}|©)",
      R"(creative commons|licensed under|cc[- ]by)",
      R"(https?://\S+|doi:\s*\S+)",
      R"(no reuse allowed without permission)",
      R"(competing interests?|conflicts? of interest)",
      R"(^\s*(table|figure|fig\.)\s*\d+\s*$)",
  };
  return patterns;
}

PatternSet::PatternSet(std::span<const std::string> patterns, bool ignore_case) {
  auto flags = std::regex::ECMAScript | std::regex::optimize;
  if (ignore_case) flags |= std::regex::icase;
  compiled_.reserve(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    try {
      compiled_.emplace_back(patterns[i], flags);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid pattern #" + std::to_string(i) + " '" + patterns[i] +
                        "': " + e.what());
    }
  }
}

bool PatternSet::matches(std::string_view unit) const {
  for (const auto& re : compiled_) {
    if (std::regex_search(unit.begin(), unit.end(), re)) return true;
  }
  return false;
}

std::vector<std::uint8_t> regex_ballast(std::span<const std::string> units,
                                        std::span<const std::string> patterns, bool ignore_case) {
  const PatternSet set(patterns, ignore_case);
  std::vector<std::uint8_t> flags(units.size(), 0);
  for (std::size_t i = 0; i < units.size(); ++i) flags[i] = set.matches(units[i]) ? 1 : 0;
  return flags;
}

}  // namespace ballast::text
