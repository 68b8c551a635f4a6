#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ballast/core/dataset.hpp"
#include "ballast/core/jsonl.hpp"
#include "ballast/core/signals.hpp"
#include "ballast/score.hpp"
#include "ballast/stats.hpp"

namespace ballast::pipeline {

enum class Modality { Structured, SemiStructured, Unstructured, Sparse };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view token);

// Selectors run in order on the features that survive the earlier ones. Each
// emits a redundancy indicator `<name>_dropped`. In veto mode a dropped
// feature also scores 1 regardless of the score form.
struct SelectorSpec {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  bool veto = true;
};

// Registered selector names.
const std::vector<std::string>& selector_names();

struct TextConfig {
  std::size_t min_words = 0;
  std::size_t lda_topics = 20;  // 0 disables the topic criterion
  std::size_t lda_iterations = 200;
  std::size_t quorum = 2;
  double tfidf_decile = 0.1;
  double entropy_max_bits = 1.5;
  double cosine_min = 0.95;
  double js_top_fraction = 0.1;
  std::size_t coherence_top_words = 10;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> stopwords;
  bool keep_stopwords = false;
};

struct PipelineConfig {
  Modality modality = Modality::Structured;
  std::filesystem::path input;
  std::optional<std::string> target;
  std::optional<TargetKind> target_kind;
  std::map<std::string, ColumnKind> schema;
  std::vector<std::filesystem::path> signals;  // ingested signal CSVs
  ListPolicy list_policy = ListPolicy::JoinTokens;
  bool skip_malformed = false;

  std::size_t bins = stats::kDefaultBins;
  stats::MiEstimator mi_estimator = stats::MiEstimator::QuantileBinned;
  double sparse_flag = 0.95;  // profile flag: sparsity at or above

  score::ScoreForm form = score::ScoreForm::Product;
  score::ScoreConfig score;
  score::ScoreInputs inputs;
  bool candidate_veto = false;  // candidate-rule features score 1
  std::vector<SelectorSpec> selectors;

  std::vector<double> taus;
  double train_frac = 0.8;

  TextConfig text;

  std::uint64_t seed = 42;
  std::size_t threads = 1;
  std::filesystem::path out = "ballast_out";
  bool timing = false;
};

// Presets: structured, semi, unstructured, sparse.
PipelineConfig preset(std::string_view name);
const std::vector<std::string>& preset_names();

// Overlays a JSON config document onto `base`. Relative paths resolve against
// `base_dir`. Unknown keys raise ConfigError.
PipelineConfig apply_config(const nlohmann::ordered_json& doc, PipelineConfig base,
                            const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base);

nlohmann::ordered_json config_snapshot(const PipelineConfig& config);

struct LoadedData {
  Dataset data;
  std::vector<std::string> warnings;
};
LoadedData load_dataset(const PipelineConfig& config);

// Signals computed from the profile (mi, entropy, norm_entropy, variance,
// density) merged with every ingested signal file.
SignalTable build_signals(const Dataset& data, const std::vector<stats::FeatureProfile>& profiles,
                          const PipelineConfig& config);

struct ScoredFeatures {
  Dataset data;
  SignalTable signals;
  std::vector<double> scores;  // dataset feature order
  std::vector<std::string> warnings;
  nlohmann::ordered_json selectors = nlohmann::ordered_json::array();
};

ScoredFeatures score_dataset(const PipelineConfig& config);

// Commands write into config.out and return the paths written.
std::vector<std::filesystem::path> cmd_profile(const PipelineConfig& config);
std::vector<std::filesystem::path> cmd_score(const PipelineConfig& config);
std::vector<std::filesystem::path> cmd_prune(const PipelineConfig& config);
std::vector<std::filesystem::path> cmd_sweep(const PipelineConfig& config);
std::vector<std::filesystem::path> cmd_text(const PipelineConfig& config);
std::vector<std::filesystem::path> cmd_storage(const PipelineConfig& config);

}  // namespace ballast::pipeline
