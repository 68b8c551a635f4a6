#pragma once

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ballast::text {

struct TokenizerConfig {
  bool lowercase = true;
  bool remove_stopwords = true;
  bool drop_numeric = true;
  std::set<std::string, std::less<>> stopwords;
  // Optional per-token normalizer (e.g. a lemmatizer) applied after
  // lowercasing and before stopword removal. Returning "" drops the token.
  std::function<std::string(std::string)> normalizer;

  // lowercase + stopwords + numeric drop, built-in English stopword list.
  static TokenizerConfig defaults();
};

// English stopword list compiled into the library; data/stopwords_en.txt
// ships the same list.
const std::set<std::string, std::less<>>& default_stopwords();
std::set<std::string, std::less<>> load_stopwords(const std::filesystem::path& path);

// Splits on whitespace and ASCII punctuation; bytes >= 0x80 count as word
// characters so UTF-8 letters stay inside tokens. Options apply in order:
// lowercase, normalizer, stopword drop, numeric drop (all-digit tokens).
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

// Splits after runs of '.', '!' or '?' that are followed by whitespace and an
// uppercase letter. A period ending a guarded abbreviation (e.g., Fig., Dr.)
// never splits.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace ballast::text
