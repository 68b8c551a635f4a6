#include "ballast/text/sentence_signals.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ballast/core/csv.hpp"
#include "ballast/core/dataset.hpp"
#include "ballast/error.hpp"
#include "ballast/redundancy.hpp"
#include "ballast/stats.hpp"
#include "ballast/text/tfidf.hpp"

namespace ballast::text {

namespace {

constexpr std::size_t kMinSentencesForDeciles = 10;

// Value at the nearest rank ceil(fraction * n) of the ascending order.
double nearest_rank(std::vector<double> values, double fraction) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

SparseMatrix slice_rows(const SparseMatrix& m, std::size_t first, std::size_t count) {
  SparseBuilder b(m.n_cols);
  for (std::size_t i = first; i < first + count; ++i) {
    std::vector<std::pair<std::uint32_t, double>> row;
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) row.emplace_back(cols[k], vals[k]);
    b.add_row(std::move(row));
  }
  return std::move(b).finish();
}

std::vector<double> max_cosine_sparse(const SparseMatrix& m) {
  const std::size_t n = m.n_rows;
  std::vector<double> norms(n, 0.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(m.n_cols);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      norms[i] += vals[k] * vals[k];
      postings[cols[k]].emplace_back(static_cast<std::uint32_t>(i), vals[k]);
    }
    norms[i] = std::sqrt(norms[i]);
  }

  std::vector<double> best(n, 0.0);
  std::vector<double> dots(n, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (const auto& [j, v] : postings[cols[k]]) {
        if (j == i) continue;
        if (dots[j] == 0.0) touched.push_back(j);
        dots[j] += vals[k] * v;
      }
    }
    for (auto j : touched) {
      best[i] = std::max(best[i], std::clamp(dots[j] / (norms[i] * norms[j]), -1.0, 1.0));
      dots[j] = 0.0;
    }
    touched.clear();
  }
  return best;
}

std::vector<double> max_cosine_dense(const std::vector<const std::vector<double>*>& vectors) {
  const std::size_t n = vectors.size();
  std::vector<double> best(n, 0.0);
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : *vectors[i]) norms[i] += v * v;
    norms[i] = std::sqrt(norms[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norms[i] == 0.0 || norms[j] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t k = 0; k < vectors[i]->size(); ++k) dot += (*vectors[i])[k] * (*vectors[j])[k];
      const double c = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      best[i] = std::max(best[i], c);
      best[j] = std::max(best[j], c);
    }
  }
  return best;
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  const CsvTable csv = read_csv_file(path);
  if (csv.header.size() < 2 || csv.header.front() != "unit_id") {
    throw DataError("embedding file header must be unit_id,v0,...");
  }
  EmbeddingTable table;
  table.dim = csv.header.size() - 1;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    std::vector<double> v;
    v.reserve(table.dim);
    for (std::size_t c = 1; c < csv.rows[r].size(); ++c) {
      auto x = parse_number(csv.rows[r][c]);
      if (!x) throw DataError("non-numeric embedding value on row " + std::to_string(r + 2));
      v.push_back(*x);
    }
    if (!table.vectors.emplace(csv.rows[r][0], std::move(v)).second) {
      throw DataError("duplicate embedding unit '" + csv.rows[r][0] + "'");
    }
  }
  return table;
}

std::string sentence_unit_id(const Document& doc, std::size_t sentence_index) {
  return doc.id + ":" + std::to_string(sentence_index);
}

double sentence_entropy(const std::vector<std::uint32_t>& tokens) {
  std::unordered_map<std::uint32_t, double> counts;
  for (auto t : tokens) counts[t] += 1.0;
  std::vector<double> c;
  c.reserve(counts.size());
  for (const auto& [t, n] : counts) c.push_back(n);
  std::sort(c.begin(), c.end());  // fixed summation order
  return stats::entropy_from_counts(c);
}

SentenceSignals sentence_signals(const Corpus& corpus, const SentenceSignalOptions& options,
                                 const TopicModel* topics, const EmbeddingTable* embeddings) {
  const std::size_t n = corpus.sentence_count();
  if (n < kMinSentencesForDeciles) {
    throw DataError("sentence signals need at least " + std::to_string(kMinSentencesForDeciles) +
                    " sentences for decile thresholds, corpus has " + std::to_string(n));
  }
  if (topics && topics->n_docs() != corpus.docs.size()) {
    throw DataError("topic model was fitted on a different corpus");
  }

  TfidfOptions raw_options;
  raw_options.l2_normalize = false;
  const TfidfResult weights = tfidf(corpus, TfidfUnit::Sentences, raw_options);

  SentenceSignals out;
  out.rows.resize(n);
  std::size_t row = 0;
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const auto& doc = corpus.docs[d];
    const std::size_t first = row;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s, ++row) {
      auto& rec = out.rows[row];
      rec.doc = d;
      rec.sentence = s;
      for (double v : weights.matrix.row_values(row)) rec.tfidf_sum += v;
      rec.entropy_bits = sentence_entropy(doc.sentences[s].tokens);
      if (topics) {
        const auto mix = topics->topic_mixture(doc.sentences[s].tokens);
        const auto theta = topics->doc_row(d);
        // Renormalize to absorb rounding before the simplex check.
        std::vector<double> p(mix), q(theta.begin(), theta.end());
        double sp = 0.0, sq = 0.0;
        for (double v : p) sp += v;
        for (double v : q) sq += v;
        for (auto& v : p) v /= sp;
        for (auto& v : q) v /= sq;
        rec.topic_js = redundancy::js_divergence(p, q);
      }
    }
    if (!doc.sentences.empty()) {
      const auto ranks =
          textrank(slice_rows(weights.matrix, first, doc.sentences.size()), options.textrank);
      for (std::size_t s = 0; s < ranks.size(); ++s) out.rows[first + s].textrank = ranks[s];
    }
  }

  std::vector<double> cosine;
  if (embeddings) {
    std::vector<const std::vector<double>*> vectors;
    vectors.reserve(n);
    for (const auto& doc : corpus.docs) {
      for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const auto id = sentence_unit_id(doc, s);
        auto it = embeddings->vectors.find(id);
        if (it == embeddings->vectors.end()) throw DataError("no embedding for unit '" + id + "'");
        if (it->second.size() != embeddings->dim) throw DataError("embedding '" + id + "' has wrong width");
        vectors.push_back(&it->second);
      }
    }
    cosine = max_cosine_dense(vectors);
  } else {
    cosine = max_cosine_sparse(weights.matrix);
  }

  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.rows[i].max_cosine = cosine[i];
    sums[i] = out.rows[i].tfidf_sum;
  }
  out.tfidf_threshold = nearest_rank(sums, options.tfidf_decile);

  if (topics) {
    std::vector<double> js(n);
    for (std::size_t i = 0; i < n; ++i) js[i] = *out.rows[i].topic_js;
    // Top fraction: nearest rank counted from the largest value.
    std::vector<double> negated(n);
    for (std::size_t i = 0; i < n; ++i) negated[i] = -js[i];
    out.js_threshold = -nearest_rank(negated, options.js_top_fraction);
  }

  for (auto& rec : out.rows) {
    rec.low_tfidf = rec.tfidf_sum <= out.tfidf_threshold;
    rec.low_entropy = rec.entropy_bits < options.entropy_max_bits;
    rec.redundant = rec.max_cosine >= options.cosine_min;
    rec.off_topic = out.js_threshold && *rec.topic_js >= *out.js_threshold;
  }
  return out;
}

std::vector<RawDocument> reconstruct_documents(const Corpus& corpus, const std::vector<bool>& keep) {
  if (keep.size() != corpus.sentence_count()) throw DataError("keep mask does not match sentence count");
  std::vector<RawDocument> out;
  out.reserve(corpus.docs.size());
  std::size_t row = 0;
  for (const auto& doc : corpus.docs) {
    RawDocument rd;
    rd.id = doc.id;
    for (const auto& s : doc.sentences) {
      if (keep[row++]) {
        std::string& field = s.field == Field::Title      ? rd.title
                             : s.field == Field::Abstract ? rd.abstract
                                                           : rd.body;
        if (!field.empty()) field.push_back(' ');
        field += s.text;
      }
    }
    out.push_back(std::move(rd));
  }
  return out;
}

}  // namespace ballast::text
