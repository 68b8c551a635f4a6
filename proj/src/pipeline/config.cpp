#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "ballast/error.hpp"
#include "ballast/pipeline.hpp"

namespace ballast::pipeline {

namespace {

using Json = nlohmann::ordered_json;

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T read(const Json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_into(const Json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = read<T>(obj, key, where);
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::vector<score::WeightedSignal> read_weights(const Json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must map signal names to weights");
  std::vector<score::WeightedSignal> out;
  for (const auto& [name, w] : obj.items()) {
    if (!w.is_number()) throw ConfigError(where + "." + name + " must be a number");
    out.push_back({name, w.get<double>()});
  }
  return out;
}

std::vector<double> default_taus() {
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(k / 20.0);
  return t;
}

void apply_score(const Json& s, PipelineConfig& cfg) {
  const std::string where = "score";
  check_keys(s, {"form", "tau", "utility_weights", "redundancy_weights", "candidate", "quorum",
                 "candidate_veto", "entropy_signal", "mi_signal", "variance_signal",
                 "external_signal", "external_threshold"},
             where);
  if (s.contains("form")) {
    const auto token = read<std::string>(s, "form", where);
    auto form = score::parse_score_form(token);
    if (!form) throw ConfigError("unknown score form '" + token + "'");
    cfg.form = *form;
  }
  auto utility = cfg.score.utility();
  auto redundancy = cfg.score.redundancy();
  if (s.contains("utility_weights") || s.contains("redundancy_weights")) {
    // Either group given replaces both, so stale weights never leak in.
    utility = s.contains("utility_weights") ? read_weights(s["utility_weights"], "score.utility_weights")
                                            : std::vector<score::WeightedSignal>{};
    redundancy = s.contains("redundancy_weights")
                     ? read_weights(s["redundancy_weights"], "score.redundancy_weights")
                     : std::vector<score::WeightedSignal>{};
  }
  double tau = cfg.score.tau();
  read_into(s, "tau", where, tau);
  auto candidate = cfg.score.candidate();
  if (s.contains("candidate")) {
    const auto& c = s["candidate"];
    check_keys(c, {"mi_max", "h_max", "var_max"}, "score.candidate");
    read_into(c, "mi_max", "score.candidate", candidate.mi_max);
    read_into(c, "h_max", "score.candidate", candidate.h_max);
    read_into(c, "var_max", "score.candidate", candidate.var_max);
  }
  std::size_t quorum = cfg.score.quorum();
  read_into(s, "quorum", where, quorum);
  cfg.score = score::ScoreConfig(std::move(utility), std::move(redundancy), tau, candidate, quorum);

  read_into(s, "candidate_veto", where, cfg.candidate_veto);
  read_into(s, "entropy_signal", where, cfg.inputs.entropy_signal);
  read_into(s, "mi_signal", where, cfg.inputs.mi_signal);
  read_into(s, "variance_signal", where, cfg.inputs.variance_signal);
  read_into(s, "external_signal", where, cfg.inputs.external_signal);
  read_into(s, "external_threshold", where, cfg.inputs.external_threshold);
}

std::vector<SelectorSpec> read_selectors(const Json& arr) {
  if (!arr.is_array()) throw ConfigError("selectors must be a list");
  std::vector<SelectorSpec> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    const std::string where = "selectors[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("name")) throw ConfigError(where + " needs a name");
    SelectorSpec spec;
    spec.name = read<std::string>(item, "name", where);
    const auto& names = selector_names();
    if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
      throw ConfigError(where + ": unknown selector '" + spec.name + "'");
    }
    for (const auto& [key, value] : item.items()) {
      if (key == "name") continue;
      if (key == "mode") {
        const auto mode = value.is_string() ? value.get<std::string>() : std::string();
        if (mode != "veto" && mode != "signal") throw ConfigError(where + ".mode must be veto or signal");
        spec.veto = mode == "veto";
      } else {
        spec.params[key] = value;
      }
    }
    out.push_back(std::move(spec));
  }
  return out;
}

void apply_text(const Json& t, TextConfig& text, const std::filesystem::path& base_dir) {
  const std::string where = "text";
  check_keys(t, {"min_words", "lda_topics", "lda_iterations", "quorum", "tfidf_decile",
                 "entropy_max_bits", "cosine_min", "js_top_fraction", "coherence_top_words",
                 "embeddings", "stopwords", "keep_stopwords"},
             where);
  read_into(t, "min_words", where, text.min_words);
  read_into(t, "lda_topics", where, text.lda_topics);
  read_into(t, "lda_iterations", where, text.lda_iterations);
  read_into(t, "quorum", where, text.quorum);
  read_into(t, "tfidf_decile", where, text.tfidf_decile);
  read_into(t, "entropy_max_bits", where, text.entropy_max_bits);
  read_into(t, "cosine_min", where, text.cosine_min);
  read_into(t, "js_top_fraction", where, text.js_top_fraction);
  read_into(t, "coherence_top_words", where, text.coherence_top_words);
  read_into(t, "keep_stopwords", where, text.keep_stopwords);
  if (t.contains("embeddings")) text.embeddings = resolve(read<std::string>(t, "embeddings", where), base_dir);
  if (t.contains("stopwords")) text.stopwords = resolve(read<std::string>(t, "stopwords", where), base_dir);
  if (text.quorum < 1) throw ConfigError("text.quorum must be at least 1");
  for (double f : {text.tfidf_decile, text.js_top_fraction}) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("text decile fractions must lie in (0, 1]");
  }
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Structured: return "structured";
    case Modality::SemiStructured: return "semi_structured";
    case Modality::Unstructured: return "unstructured";
    case Modality::Sparse: return "sparse";
  }
  return "structured";
}

std::optional<Modality> parse_modality(std::string_view token) {
  for (auto m : {Modality::Structured, Modality::SemiStructured, Modality::Unstructured, Modality::Sparse}) {
    if (token == to_string(m)) return m;
  }
  if (token == "semi") return Modality::SemiStructured;
  return std::nullopt;
}

const std::vector<std::string>& selector_names() {
  static const std::vector<std::string> names{"variance", "correlation", "mi_retention", "lasso",
                                              "external", "pca", "kmeans"};
  return names;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"structured", "semi", "unstructured", "sparse"};
  return names;
}

PipelineConfig preset(std::string_view name) {
  PipelineConfig c;
  c.taus = default_taus();
  if (name == "structured") {
    c.modality = Modality::Structured;
    c.form = score::ScoreForm::Product;
    c.candidate_veto = true;
    c.score = score::ScoreConfig({}, {}, 0.5);
    c.selectors = {{"variance", Json{{"threshold", 0.0}}, true},
                   {"correlation", Json{{"threshold", 0.95}, {"method", "pearson"}}, true}};
  } else if (name == "semi" || name == "semi_structured") {
    c.modality = Modality::SemiStructured;
    c.form = score::ScoreForm::Weighted;
    c.score = score::ScoreConfig({{"mi", 0.5}, {"norm_entropy", 0.3}, {"density", 0.2}}, {}, 0.5);
    c.selectors = {{"correlation", Json{{"threshold", 0.95}, {"method", "spearman"}}, true}};
  } else if (name == "unstructured") {
    c.modality = Modality::Unstructured;
  } else if (name == "sparse") {
    c.modality = Modality::Sparse;
    c.form = score::ScoreForm::Weighted;
    c.score = score::ScoreConfig({{"density", 0.4}, {"mi", 0.4}, {"norm_entropy", 0.2}}, {}, 0.5);
    c.selectors = {{"variance", Json{{"threshold", 0.0}}, true}};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

PipelineConfig apply_config(const Json& doc, PipelineConfig cfg, const std::filesystem::path& base_dir) {
  const std::string where = "config";
  check_keys(doc, {"preset", "modality", "input", "target", "target_kind", "schema", "signals",
                   "list_policy", "skip_malformed", "bins", "mi_estimator", "sparse_flag", "score",
                   "selectors", "sweep", "text", "seed", "threads", "out", "timing"},
             where);
  if (doc.contains("modality")) {
    const auto token = read<std::string>(doc, "modality", where);
    auto m = parse_modality(token);
    if (!m) throw ConfigError("unknown modality '" + token + "'");
    cfg.modality = *m;
  }
  if (doc.contains("input")) cfg.input = resolve(read<std::string>(doc, "input", where), base_dir);
  if (doc.contains("target")) {
    if (doc["target"].is_null()) cfg.target.reset();
    else cfg.target = read<std::string>(doc, "target", where);
  }
  if (doc.contains("target_kind")) {
    const auto k = read<std::string>(doc, "target_kind", where);
    if (k == "classification") cfg.target_kind = TargetKind::Classification;
    else if (k == "regression") cfg.target_kind = TargetKind::Regression;
    else throw ConfigError("target_kind must be classification or regression");
  }
  if (doc.contains("schema")) {
    const auto& s = doc["schema"];
    if (!s.is_object()) throw ConfigError("schema must map column names to kinds");
    for (const auto& [col, kind] : s.items()) {
      auto k = kind.is_string() ? parse_column_kind(kind.get<std::string>()) : std::nullopt;
      if (!k) throw ConfigError("schema." + col + " must be numeric, categorical or text");
      cfg.schema[col] = *k;
    }
  }
  if (doc.contains("signals")) {
    cfg.signals.clear();
    const auto& s = doc["signals"];
    if (s.is_string()) {
      cfg.signals.push_back(resolve(s.get<std::string>(), base_dir));
    } else {
      for (const auto& p : read<std::vector<std::string>>(doc, "signals", where)) {
        cfg.signals.push_back(resolve(p, base_dir));
      }
    }
  }
  if (doc.contains("list_policy")) {
    const auto token = read<std::string>(doc, "list_policy", where);
    auto p = parse_list_policy(token);
    if (!p) throw ConfigError("unknown list_policy '" + token + "'");
    cfg.list_policy = *p;
  }
  read_into(doc, "skip_malformed", where, cfg.skip_malformed);
  read_into(doc, "bins", where, cfg.bins);
  if (cfg.bins < 2) throw ConfigError("bins must be at least 2");
  if (doc.contains("mi_estimator")) {
    const auto token = read<std::string>(doc, "mi_estimator", where);
    if (token == "binned") cfg.mi_estimator = stats::MiEstimator::QuantileBinned;
    else if (token == "plugin") cfg.mi_estimator = stats::MiEstimator::PluginCategorical;
    else throw ConfigError("mi_estimator must be binned or plugin");
  }
  read_into(doc, "sparse_flag", where, cfg.sparse_flag);
  if (doc.contains("score")) apply_score(doc["score"], cfg);
  if (doc.contains("selectors")) cfg.selectors = read_selectors(doc["selectors"]);
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    check_keys(s, {"taus", "train_frac"}, "sweep");
    read_into(s, "taus", "sweep", cfg.taus);
    read_into(s, "train_frac", "sweep", cfg.train_frac);
  }
  if (doc.contains("text")) apply_text(doc["text"], cfg.text, base_dir);
  read_into(doc, "seed", where, cfg.seed);
  read_into(doc, "threads", where, cfg.threads);
  if (doc.contains("out")) cfg.out = resolve(read<std::string>(doc, "out", where), base_dir);
  read_into(doc, "timing", where, cfg.timing);

  if (!std::is_sorted(cfg.taus.begin(), cfg.taus.end())) throw ConfigError("sweep.taus must be sorted ascending");
  for (double t : cfg.taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("sweep.taus must lie in [0, 1]");
  }
  if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) throw ConfigError("sweep.train_frac must lie in (0, 1)");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return apply_config(doc, std::move(base), path.parent_path());
}

Json config_snapshot(const PipelineConfig& c) {
  Json j;
  j["modality"] = std::string(to_string(c.modality));
  j["input"] = c.input.generic_string();
  j["target"] = c.target ? Json(*c.target) : Json(nullptr);
  j["bins"] = c.bins;
  j["mi_estimator"] = c.mi_estimator == stats::MiEstimator::QuantileBinned ? "binned" : "plugin";
  Json score = score::config_to_json(c.score);
  score["form"] = std::string(score::to_string(c.form));
  score["candidate_veto"] = c.candidate_veto;
  j["score"] = std::move(score);
  Json sel = Json::array();
  for (const auto& s : c.selectors) {
    Json item{{"name", s.name}, {"mode", s.veto ? "veto" : "signal"}};
    for (const auto& [k, v] : s.params.items()) item[k] = v;
    sel.push_back(std::move(item));
  }
  j["selectors"] = std::move(sel);
  Json signals = Json::array();
  for (const auto& p : c.signals) signals.push_back(p.generic_string());
  j["signals"] = std::move(signals);
  j["seed"] = c.seed;
  return j;
}

}  // namespace ballast::pipeline
