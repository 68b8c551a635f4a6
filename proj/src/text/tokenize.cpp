#include "ballast/text/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "ballast/error.hpp"

namespace ballast::text {

namespace {

// NLTK English list.
constexpr std::array<std::string_view, 179> kStopwords = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
    "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
    "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't"};

constexpr std::array<std::string_view, 26> kAbbreviations = {
    "e.g", "i.e", "etc", "vs", "dr", "mr", "mrs", "ms", "prof", "fig", "figs", "al", "no",
    "approx", "cf", "eq", "eqs", "ref", "refs", "vol", "st", "jr", "sr", "inc", "ltd", "resp"};

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// The word immediately before position `dot` (exclusive), without trailing dots.
std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(static_cast<unsigned char>(text[start - 1]))) --start;
  std::string_view w = text.substr(start, dot - start);
  while (!w.empty() && (w.front() == '(' || w.front() == '"' || w.front() == '\'')) w.remove_prefix(1);
  return lower_ascii(w);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

TokenizerConfig TokenizerConfig::defaults() {
  TokenizerConfig c;
  c.stopwords = default_stopwords();
  return c;
}

const std::set<std::string, std::less<>>& default_stopwords() {
  static const std::set<std::string, std::less<>> words(kStopwords.begin(), kStopwords.end());
  return words;
}

std::set<std::string, std::less<>> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read stopword file '" + path.string() + "'");
  std::set<std::string, std::less<>> words;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty() && t.front() != '#') words.emplace(lower_ascii(t));
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      if (config.lowercase) tok = lower_ascii(tok);
      if (config.normalizer) tok = config.normalizer(std::move(tok));
      const bool stop = config.remove_stopwords && config.stopwords.count(tok) > 0;
      const bool numeric = config.drop_numeric && all_digits(tok);
      if (!tok.empty() && !stop && !numeric) tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  const auto emit = [&](std::size_t end) {
    auto s = trim(text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
  };
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first_mark = i;
    while (i < text.size() && is_terminator(text[i])) ++i;
    while (i < text.size() && (text[i] == '"' || text[i] == '\'' || text[i] == ')')) ++i;
    const std::size_t end = i;
    std::size_t k = i;
    while (k < text.size() && is_space(static_cast<unsigned char>(text[k]))) ++k;
    if (k == i || k >= text.size()) continue;
    if (!std::isupper(static_cast<unsigned char>(text[k]))) continue;
    if (text[first_mark] == '.' && end == first_mark + 1) {
      const auto w = word_before(text, first_mark);
      if (std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end()) {
        continue;
      }
    }
    emit(end);
    start = k;
    i = k;
  }
  emit(text.size());
  return sentences;
}

}  // namespace ballast::text
