#include "ballast/text/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ballast/error.hpp"

namespace ballast::text {

TfidfResult tfidf(const std::vector<std::vector<std::string>>& units, const TfidfOptions& options) {
  if (units.empty()) throw DataError("TF-IDF needs at least one unit");

  std::map<std::string, std::uint64_t> frequency;
  for (const auto& u : units) {
    for (const auto& t : u) ++frequency[t];
  }
  if (frequency.empty()) throw DataError("empty vocabulary");

  std::vector<std::pair<std::string, std::uint64_t>> ranked(frequency.begin(), frequency.end());
  if (options.vocab_size > 0 && ranked.size() > options.vocab_size) {
    // Highest frequency first; equal frequencies keep lexicographic order.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    ranked.resize(options.vocab_size);
    std::sort(ranked.begin(), ranked.end());
  }

  TfidfResult r;
  std::unordered_map<std::string, std::uint32_t> column;
  for (const auto& [term, count] : ranked) {
    column.emplace(term, static_cast<std::uint32_t>(r.terms.size()));
    r.terms.push_back(term);
  }
  r.doc_freq.assign(r.terms.size(), 0);

  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::map<std::uint32_t, double> counts;
    for (const auto& t : units[i]) {
      if (auto it = column.find(t); it != column.end()) counts[it->second] += 1.0;
    }
    for (const auto& [c, n] : counts) ++r.doc_freq[c];
    rows[i].assign(counts.begin(), counts.end());
  }

  const double d = static_cast<double>(units.size());
  r.idf.resize(r.terms.size());
  for (std::size_t c = 0; c < r.terms.size(); ++c) {
    r.idf[c] = std::log((1.0 + d) / (1.0 + static_cast<double>(r.doc_freq[c]))) + 1.0;
  }

  SparseBuilder builder(r.terms.size());
  for (auto& row : rows) {
    double norm = 0.0;
    for (auto& [c, v] : row) {
      v *= r.idf[c];
      norm += v * v;
    }
    if (options.l2_normalize && norm > 0.0) {
      const double inv = 1.0 / std::sqrt(norm);
      for (auto& [c, v] : row) v *= inv;
    }
    builder.add_row(std::move(row));
  }
  r.matrix = std::move(builder).finish();
  return r;
}

TfidfResult tfidf(const Corpus& corpus, TfidfUnit unit, const TfidfOptions& options) {
  return tfidf(unit == TfidfUnit::Documents ? corpus.document_tokens() : corpus.sentence_tokens(),
               options);
}

}  // namespace ballast::text
