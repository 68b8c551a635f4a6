#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "ballast/core/corpus_io.hpp"
#include "ballast/core/csv.hpp"
#include "ballast/error.hpp"
#include "ballast/harness.hpp"
#include "ballast/pipeline.hpp"
#include "ballast/redundancy.hpp"
#include "ballast/select.hpp"
#include "ballast/text/corpus.hpp"
#include "ballast/text/lda.hpp"
#include "ballast/text/regex.hpp"
#include "ballast/text/sentence_signals.hpp"
#include "ballast/text/tfidf.hpp"

namespace ballast::pipeline {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void require_input(const PipelineConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("no input file configured");
  if (!fs::exists(cfg.input)) throw DataError("input file '" + cfg.input.string() + "' does not exist");
}

void require_tabular(const PipelineConfig& cfg, std::string_view command) {
  if (cfg.modality == Modality::Unstructured) {
    throw ConfigError(std::string(command) + " works on tabular data; use 'text' for the unstructured modality");
  }
}

fs::path prepare_out(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw DataError("cannot create output directory '" + cfg.out.string() + "': " + ec.message());
  return cfg.out;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"; }

std::string lines(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += i + "\n";
  return s;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

stats::ProfileOptions profile_options(const PipelineConfig& cfg) {
  stats::ProfileOptions o;
  o.bins = cfg.bins;
  o.mi.estimator = cfg.mi_estimator;
  o.mi.bins = cfg.bins;
  o.threads = cfg.threads;
  return o;
}

// --------------------------------------------------------------------------
// Selector chain

double param(const SelectorSpec& s, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!s.params.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("selector '" + s.name + "' needs parameter '" + key + "'");
  }
  const auto& v = s.params[key];
  if (!v.is_number()) throw ConfigError("selector '" + s.name + "' parameter '" + key + "' must be a number");
  return v.get<double>();
}

void check_params(const SelectorSpec& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : s.params.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("selector '" + s.name + "' has no parameter '" + key + "'");
    }
  }
}

struct SelectorOutcome {
  std::vector<std::string> dropped;
  Json info = Json::object();
};

Eigen::VectorXd target_vector(const Dataset& data) {
  const auto& t = *data.target();
  return Eigen::Map<const Eigen::VectorXd>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}

SelectorOutcome run_selector(const SelectorSpec& s, const Dataset& alive, const SignalTable& signals,
                             const PipelineConfig& cfg) {
  SelectorOutcome out;
  if (s.name == "variance") {
    check_params(s, {"threshold"});
    out.dropped = select::variance_filter(alive, param(s, "threshold", 0.0)).dropped;
  } else if (s.name == "correlation") {
    check_params(s, {"threshold", "method"});
    const std::string method = s.params.value("method", std::string("pearson"));
    if (method != "pearson" && method != "spearman") {
      throw ConfigError("correlation method must be pearson or spearman");
    }
    const auto m = redundancy::correlation_matrix(
        alive, method == "pearson" ? redundancy::CorrelationMethod::Pearson : redundancy::CorrelationMethod::Spearman,
        cfg.threads);
    const auto r = redundancy::correlation_filter(m, param(s, "threshold", 0.95));
    for (auto i : r.dropped) out.dropped.push_back(m.names[i]);
  } else if (s.name == "mi_retention") {
    check_params(s, {"top_k", "min_mi"});
    select::RetentionRule rule;
    if (s.params.contains("top_k")) rule.top_k = static_cast<std::size_t>(param(s, "top_k"));
    if (s.params.contains("min_mi")) rule.min_mi = param(s, "min_mi");
    if (!signals.has_signal(cfg.inputs.mi_signal)) throw ConfigError("mi_retention needs a target for MI");
    // Rank only the surviving features.
    SignalTable sub;
    for (const auto& name : alive.feature_names()) {
      sub.add(name, "mi", SignalKind::Utility, signals.find(name, cfg.inputs.mi_signal)->raw_value);
    }
    auto sel = select::mi_retention_select(sub, rule);
    out.dropped = std::move(sel.dropped);
    if (!sel.warnings.empty()) out.info["warnings"] = sel.warnings;
  } else if (s.name == "external") {
    check_params(s, {"signal", "threshold"});
    const std::string signal = s.params.value("signal", cfg.inputs.external_signal);
    SignalTable sub;
    for (const auto& name : alive.feature_names()) {
      const auto* e = signals.find(name, signal);
      if (!e) throw DataError("feature '" + name + "' has no '" + signal + "' signal");
      sub.add(name, signal, e->kind, e->raw_value);
    }
    auto sel = select::external_importance_select(sub, signal, param(s, "threshold"));
    out.dropped = std::move(sel.dropped);
    if (!sel.warnings.empty()) out.info["warnings"] = sel.warnings;
  } else if (s.name == "lasso") {
    check_params(s, {"lambda"});
    if (!alive.has_target()) throw ConfigError("lasso selector needs a target");
    std::vector<std::size_t> cols;
    const auto x = select::numeric_matrix(alive, &cols);
    const double lambda = param(s, "lambda");
    const auto fit = select::lasso_fit(x, target_vector(alive), lambda);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (fit.coefficients[static_cast<Eigen::Index>(c)] == 0.0) out.dropped.push_back(alive.column(cols[c]).name);
    }
    out.info["lambda_max"] = select::lasso_lambda_max(x, target_vector(alive));
    out.info["converged"] = fit.converged;
  } else if (s.name == "pca") {
    check_params(s, {"variance", "min_loading"});
    std::vector<std::size_t> cols;
    const auto x = select::standardize(select::numeric_matrix(alive, &cols)).x;
    const auto fit = select::pca_fit(x);
    const auto k = select::pca_select(fit, param(s, "variance", 0.95));
    const double min_loading = param(s, "min_loading", 0.1);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double loading =
          fit.components.topRows(static_cast<Eigen::Index>(k)).col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff();
      if (loading < min_loading) out.dropped.push_back(alive.column(cols[c]).name);
    }
    out.info["components"] = k;
  } else if (s.name == "kmeans") {
    check_params(s, {"k"});
    // Clusters the features themselves; the member nearest each centroid
    // represents its cluster and the rest are dropped.
    std::vector<std::size_t> cols;
    const Eigen::MatrixXd points = select::standardize(select::numeric_matrix(alive, &cols)).x.transpose();
    const auto k = static_cast<std::size_t>(param(s, "k"));
    const auto km = select::kmeans(points, k, cfg.seed);
    std::vector<std::size_t> representative(k, std::numeric_limits<std::size_t>::max());
    std::vector<double> best(k, std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto a = km.assignments[c];
      const double d = (points.row(static_cast<Eigen::Index>(c)) - km.centroids.row(static_cast<Eigen::Index>(a))).squaredNorm();
      if (d < best[a]) {
        best[a] = d;
        representative[a] = c;
      }
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (representative[km.assignments[c]] != c) out.dropped.push_back(alive.column(cols[c]).name);
    }
    out.info["inertia"] = km.inertia;
  }
  return out;
}

}  // namespace

LoadedData load_dataset(const PipelineConfig& cfg) {
  require_input(cfg);
  LoadedData out;
  const auto ext = cfg.input.extension().string();
  if (ext == ".jsonl" || ext == ".json") {
    JsonlOptions o;
    o.list_policy = cfg.list_policy;
    o.skip_malformed = cfg.skip_malformed;
    o.target = cfg.target;
    o.target_kind = cfg.target_kind;
    auto r = flatten_jsonl(cfg.input, o);
    out.data = std::move(r.data);
    out.warnings = std::move(r.warnings);
    if (!cfg.schema.empty()) out.warnings.push_back("schema overrides apply to CSV input only");
  } else {
    CsvLoadOptions o;
    o.schema = cfg.schema;
    o.target = cfg.target;
    o.target_kind = cfg.target_kind;
    out.data = load_csv(cfg.input, o);
  }
  if (out.data.n_features() == 0) throw DataError("input has no feature columns");
  return out;
}

SignalTable build_signals(const Dataset& data, const std::vector<stats::FeatureProfile>& profiles,
                          const PipelineConfig& cfg) {
  SignalTable t;
  for (const auto& p : profiles) {
    if (p.mi_bits) t.add(p.name, "mi", SignalKind::Utility, *p.mi_bits);
    t.add(p.name, "entropy", SignalKind::Utility, p.entropy_bits);
    t.add(p.name, "norm_entropy", SignalKind::Utility, p.norm_entropy);
    t.add(p.name, "variance", SignalKind::Utility, p.variance);
    t.add(p.name, "density", SignalKind::Utility, 1.0 - p.sparsity);
  }
  for (const auto& path : cfg.signals) {
    if (!fs::exists(path)) throw DataError("signal file '" + path.string() + "' does not exist");
    const SignalTable ingested = ingest_signals(path);
    std::set<std::string> unknown;
    for (const auto& e : ingested.entries()) {
      if (!data.index_of(e.feature_id)) {
        unknown.insert(e.feature_id);
        continue;
      }
      t.add(e.feature_id, e.signal, e.kind, e.raw_value);
    }
    for (const auto& u : unknown) {
      std::cerr << "warning: signal file '" << path.string() << "' names unknown feature '" << u << "'\n";
    }
  }
  return t;
}

ScoredFeatures score_dataset(const PipelineConfig& cfg) {
  auto loaded = load_dataset(cfg);
  ScoredFeatures r;
  r.data = std::move(loaded.data);
  r.warnings = std::move(loaded.warnings);
  const auto profiles = stats::profile_dataset(r.data, profile_options(cfg));
  r.signals = build_signals(r.data, profiles, cfg);
  const auto names = r.data.feature_names();
  const std::size_t m = names.size();

  std::vector<double> veto(m, 0.0);
  std::vector<std::uint8_t> alive(m, 1);
  for (std::size_t s = 0; s < cfg.selectors.size(); ++s) {
    const auto& spec = cfg.selectors[s];
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < m; ++j) {
      if (alive[j]) idx.push_back(j);
    }
    if (idx.empty()) break;
    const auto outcome = run_selector(spec, r.data.select(idx), r.signals, cfg);
    std::string signal = spec.name + "_dropped";
    if (r.signals.has_signal(signal)) signal += "_" + std::to_string(s);
    const std::set<std::string> dropped(outcome.dropped.begin(), outcome.dropped.end());
    for (std::size_t j = 0; j < m; ++j) {
      const bool hit = dropped.count(names[j]) > 0;
      r.signals.add(names[j], signal, SignalKind::Redundancy, hit ? 1.0 : 0.0);
      if (hit) {
        alive[j] = 0;
        if (spec.veto) veto[j] = 1.0;
      }
    }
    Json info{{"name", spec.name}, {"signal", signal}, {"mode", spec.veto ? "veto" : "signal"},
              {"dropped", outcome.dropped}};
    for (const auto& [k, v] : outcome.info.items()) info[k] = v;
    r.selectors.push_back(std::move(info));
  }

  const bool needs_mi = cfg.form == score::ScoreForm::Product || cfg.form == score::ScoreForm::Candidate ||
                        cfg.candidate_veto;
  if (needs_mi && !r.signals.has_signal(cfg.inputs.mi_signal)) {
    throw ConfigError("score form '" + std::string(score::to_string(cfg.form)) +
                      "' needs a target column for mutual information");
  }
  r.scores = score::score_features(r.signals, cfg.form, cfg.score, cfg.inputs);
  if (cfg.candidate_veto) {
    const auto mi = r.signals.raw_column(cfg.inputs.mi_signal);
    const auto h = r.signals.raw_column(cfg.inputs.entropy_signal);
    const auto var = r.signals.raw_column(cfg.inputs.variance_signal);
    for (std::size_t j = 0; j < m; ++j) {
      if (score::candidate_rule(mi[j], h[j], var[j], cfg.score.candidate())) veto[j] = 1.0;
    }
  }
  for (std::size_t j = 0; j < m; ++j) r.scores[j] = std::max(r.scores[j], veto[j]);
  return r;
}

std::vector<fs::path> cmd_profile(const PipelineConfig& cfg) {
  require_tabular(cfg, "profile");
  auto loaded = load_dataset(cfg);
  warn(loaded.warnings);
  const auto profiles = stats::profile_dataset(loaded.data, profile_options(cfg));
  std::ostringstream csv;
  write_csv_row(csv, {"feature", "kind", "entropy_bits", "norm_entropy", "variance", "sparsity", "mi",
                      "empty_support", "constant", "candidate", "sparse"});
  for (const auto& p : profiles) {
    std::string candidate;
    if (p.mi_bits) {
      candidate = score::candidate_rule(*p.mi_bits, p.norm_entropy, p.variance, cfg.score.candidate()) ? "1" : "0";
    }
    const bool constant = !p.empty_support && p.entropy_bits == 0.0;
    write_csv_row(csv, {p.name, std::string(to_string(p.kind)), format_number(p.entropy_bits),
                        format_number(p.norm_entropy), format_number(p.variance), format_number(p.sparsity),
                        cell(p.mi_bits), p.empty_support ? "1" : "0", constant ? "1" : "0", candidate,
                        p.sparsity >= cfg.sparse_flag ? "1" : "0"});
  }
  const auto path = prepare_out(cfg) / "profiles.csv";
  write_file(path, csv.str());
  return {path};
}

namespace {

std::vector<fs::path> write_score_outputs(const PipelineConfig& cfg, const ScoredFeatures& scored) {
  const auto dir = prepare_out(cfg);
  const auto report = score::make_report(scored.data.feature_names(), scored.scores, cfg.form, cfg.score,
                                         config_snapshot(cfg));
  Json j = score::report_to_json(report);
  j["selectors"] = scored.selectors;
  std::ostringstream signals;
  write_signals_csv(signals, score::normalize_signals(scored.signals));
  write_file(dir / "ballast_report.json", dump(j));
  write_file(dir / "kept_features.txt", lines(report.kept));
  write_file(dir / "dropped_features.txt", lines(report.dropped));
  write_file(dir / "signals.csv", signals.str());
  return {dir / "ballast_report.json", dir / "kept_features.txt", dir / "dropped_features.txt",
          dir / "signals.csv"};
}

}  // namespace

std::vector<fs::path> cmd_score(const PipelineConfig& cfg) {
  require_tabular(cfg, "score");
  const auto scored = score_dataset(cfg);
  warn(scored.warnings);
  return write_score_outputs(cfg, scored);
}

std::vector<fs::path> cmd_prune(const PipelineConfig& cfg) {
  require_tabular(cfg, "prune");
  const auto scored = score_dataset(cfg);
  warn(scored.warnings);
  const Dataset pruned = score::prune(scored.data, scored.scores, cfg.score.tau());
  auto written = write_score_outputs(cfg, scored);
  std::ostringstream csv;
  write_dataset_csv(csv, pruned);
  const auto path = cfg.out / "pruned.csv";
  write_file(path, csv.str());
  written.push_back(path);
  return written;
}

std::vector<fs::path> cmd_sweep(const PipelineConfig& cfg) {
  require_tabular(cfg, "sweep");
  if (!cfg.target) throw ConfigError("sweep needs a target column");
  const auto scored = score_dataset(cfg);
  warn(scored.warnings);
  harness::SweepOptions o;
  o.seed = cfg.seed;
  o.train_frac = cfg.train_frac;
  o.threads = cfg.threads;
  const auto curve = harness::sweep(scored.data, scored.scores, cfg.taus, o);
  std::ostringstream csv;
  harness::write_tradeoff_csv(csv, curve, cfg.timing);
  const auto path = prepare_out(cfg) / "tradeoff.csv";
  write_file(path, csv.str());
  return {path};
}

std::vector<fs::path> cmd_text(const PipelineConfig& cfg) {
  if (cfg.modality != Modality::Unstructured) {
    throw ConfigError("text needs the unstructured modality (try --preset unstructured)");
  }
  require_input(cfg);
  const auto& tc = cfg.text;
  const RawCorpus raw = load_corpus(cfg.input, tc.min_words);

  auto tokenizer = text::TokenizerConfig::defaults();
  if (tc.stopwords) tokenizer.stopwords = text::load_stopwords(*tc.stopwords);
  tokenizer.remove_stopwords = !tc.keep_stopwords;
  const text::Corpus corpus = text::build_corpus(raw, tokenizer);

  std::optional<text::TopicModel> topics;
  if (tc.lda_topics > 0) {
    text::LdaOptions lo;
    lo.topics = tc.lda_topics;
    lo.iterations = tc.lda_iterations;
    lo.seed = cfg.seed;
    topics = text::lda_fit(corpus, lo);
  }
  std::optional<text::EmbeddingTable> embeddings;
  if (tc.embeddings) embeddings = text::load_embeddings(*tc.embeddings);

  text::SentenceSignalOptions so;
  so.tfidf_decile = tc.tfidf_decile;
  so.entropy_max_bits = tc.entropy_max_bits;
  so.cosine_min = tc.cosine_min;
  so.js_top_fraction = tc.js_top_fraction;
  const auto sig = text::sentence_signals(corpus, so, topics ? &*topics : nullptr,
                                          embeddings ? &*embeddings : nullptr);

  const text::PatternSet patterns(text::default_ballast_patterns());
  std::vector<bool> keep;
  keep.reserve(sig.rows.size());
  std::ostringstream csv;
  write_csv_row(csv, {"doc_id", "sentence", "field", "tfidf_sum", "entropy_bits", "max_cosine", "topic_js",
                      "textrank", "low_tfidf", "low_entropy", "redundant", "off_topic", "votes", "ballast",
                      "regex_match", "text"});
  std::size_t flagged[4] = {0, 0, 0, 0};
  std::size_t removed = 0, regex_hits = 0;
  for (const auto& row : sig.rows) {
    const auto& doc = corpus.docs[row.doc];
    const auto& sentence = doc.sentences[row.sentence];
    const auto flags = row.flags();
    const auto votes = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    for (std::size_t k = 0; k < 4; ++k) flagged[k] += flags[k];
    const bool ballast = score::vote_ballast(flags, tc.quorum);
    const bool regex = patterns.matches(sentence.text);
    removed += ballast;
    regex_hits += regex;
    keep.push_back(!ballast);
    const char* field = sentence.field == text::Field::Title      ? "title"
                        : sentence.field == text::Field::Abstract ? "abstract"
                                                                  : "body";
    write_csv_row(csv, {doc.id, std::to_string(row.sentence), field, format_number(row.tfidf_sum),
                        format_number(row.entropy_bits), format_number(row.max_cosine), cell(row.topic_js),
                        format_number(row.textrank), row.low_tfidf ? "1" : "0", row.low_entropy ? "1" : "0",
                        row.redundant ? "1" : "0", row.off_topic ? "1" : "0", std::to_string(votes),
                        ballast ? "1" : "0", regex ? "1" : "0", sentence.text});
  }

  std::ostringstream filtered;
  write_corpus_jsonl(filtered, text::reconstruct_documents(corpus, keep));

  const std::size_t n = sig.rows.size();
  Json summary;
  summary["documents"] = corpus.docs.size();
  summary["documents_dropped"] = raw.dropped;
  summary["sentences"] = n;
  summary["sentences_removed"] = removed;
  summary["reduction_ratio"] = static_cast<double>(removed) / static_cast<double>(n);
  summary["flag_counts"] = {{"low_tfidf", flagged[0]}, {"low_entropy", flagged[1]},
                            {"redundant", flagged[2]}, {"off_topic", flagged[3]}};
  summary["regex_matches"] = regex_hits;
  summary["thresholds"] = {{"tfidf_sum_at_most", sig.tfidf_threshold},
                           {"entropy_below_bits", tc.entropy_max_bits},
                           {"cosine_at_least", tc.cosine_min},
                           {"topic_js_at_least", sig.js_threshold ? Json(*sig.js_threshold) : Json(nullptr)},
                           {"quorum", tc.quorum}};
  if (topics) {
    Json t = Json::array();
    double total = 0.0;
    for (std::size_t k = 0; k < topics->n_topics; ++k) {
      std::vector<std::string> words;
      for (auto w : topics->top_words(k, tc.coherence_top_words)) words.push_back(corpus.vocab[w]);
      Json item{{"topic", k}, {"top_words", words}};
      if (words.size() >= 2) {
        const double c = text::umass_coherence(words, corpus);
        item["umass"] = c;
        total += c;
      }
      t.push_back(std::move(item));
    }
    summary["topics"] = std::move(t);
    summary["mean_umass"] = total / static_cast<double>(topics->n_topics);
  }
  summary["seed"] = cfg.seed;

  const auto dir = prepare_out(cfg);
  write_file(dir / "sentence_signals.csv", csv.str());
  write_file(dir / "filtered_corpus.jsonl", filtered.str());
  write_file(dir / "text_summary.json", dump(summary));
  return {dir / "sentence_signals.csv", dir / "filtered_corpus.jsonl", dir / "text_summary.json"};
}

std::vector<fs::path> cmd_storage(const PipelineConfig& cfg) {
  harness::StorageReport report;
  Json extra = Json::object();
  if (cfg.modality == Modality::Unstructured) {
    require_input(cfg);
    const RawCorpus raw = load_corpus(cfg.input, cfg.text.min_words);
    auto tokenizer = text::TokenizerConfig::defaults();
    tokenizer.remove_stopwords = !cfg.text.keep_stopwords;
    const auto corpus = text::build_corpus(raw, tokenizer);
    const auto tf = text::tfidf(corpus, text::TfidfUnit::Documents, {});
    report = harness::storage_report(tf.matrix);
    for (std::size_t j = 0; j < report.columns.size(); ++j) report.columns[j].name = tf.terms[j];
    extra["representation"] = "tfidf_documents";
  } else {
    auto loaded = load_dataset(cfg);
    warn(loaded.warnings);
    report = harness::storage_report(loaded.data);
    extra["representation"] = "numeric_features";
  }
  warn(report.warnings);
  Json j = extra;
  const Json body = harness::storage_to_json(report);
  for (const auto& [k, v] : body.items()) j[k] = v;
  const auto path = prepare_out(cfg) / "storage.json";
  write_file(path, dump(j));
  return {path};
}

}  // namespace ballast::pipeline
