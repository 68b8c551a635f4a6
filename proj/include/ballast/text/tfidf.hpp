#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ballast/core/sparse.hpp"
#include "ballast/text/corpus.hpp"

namespace ballast::text {

enum class TfidfUnit { Documents, Sentences };

struct TfidfOptions {
  std::size_t vocab_size = 0;  // keep the top-K terms by corpus frequency; 0 keeps all
  bool l2_normalize = true;
};

struct TfidfResult {
  SparseMatrix matrix;              // one row per unit, one column per kept term
  std::vector<std::string> terms;   // column labels, lexicographic
  std::vector<double> idf;          // per column
  std::vector<std::size_t> doc_freq;
};

// tf is the raw count in a unit, idf = ln((1 + D) / (1 + df)) + 1 with D the
// number of units. Rows are L2-normalized unless disabled; empty rows stay
// empty. Throws DataError when no term survives.
TfidfResult tfidf(const std::vector<std::vector<std::string>>& units, const TfidfOptions& options);
TfidfResult tfidf(const Corpus& corpus, TfidfUnit unit, const TfidfOptions& options);

}  // namespace ballast::text
