#pragma once

#include <cstdint>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ballast::text {

// Case-insensitive boilerplate patterns used when none are configured.
const std::vector<std::string>& default_ballast_patterns();

class PatternSet {
 public:
  // Throws ConfigError naming the index of the first pattern that fails to
  // compile.
  explicit PatternSet(std::span<const std::string> patterns, bool ignore_case = true);

  bool matches(std::string_view unit) const;
  std::size_t size() const noexcept { return compiled_.size(); }

 private:
  std::vector<std::regex> compiled_;
};

// 1 for every unit matched by any pattern (ballast), 0 otherwise. The
// corresponding utility signal is the negation.
std::vector<std::uint8_t> regex_ballast(std::span<const std::string> units,
                                        std::span<const std::string> patterns,
                                        bool ignore_case = true);

}  // namespace ballast::text
