#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ballast/core/dataset.hpp"
#include "ballast/core/signals.hpp"

namespace ballast::score {

// Per-signal min-max scaling over features. A signal whose values are all
// equal maps to 0.5.
SignalTable normalize_signals(SignalTable table);

struct CandidateThresholds {
  double mi_max = 0.01;
  double h_max = 0.1;
  double var_max = 0.05;
};

struct WeightedSignal {
  std::string signal;
  double weight = 0.0;
};

// Weights are nonnegative and sum to 1 across both groups (within 1e-9).
// A config with no weights at all is allowed for the unweighted score forms;
// weighted scoring then raises.
class ScoreConfig {
 public:
  ScoreConfig() = default;
  ScoreConfig(std::vector<WeightedSignal> utility, std::vector<WeightedSignal> redundancy,
              double tau, CandidateThresholds candidate = {}, std::size_t quorum = 2);

  const std::vector<WeightedSignal>& utility() const noexcept { return utility_; }
  const std::vector<WeightedSignal>& redundancy() const noexcept { return redundancy_; }
  std::vector<double> utility_weights() const;
  std::vector<double> redundancy_weights() const;
  bool has_weights() const noexcept { return !utility_.empty() || !redundancy_.empty(); }

  double tau() const noexcept { return tau_; }
  const CandidateThresholds& candidate() const noexcept { return candidate_; }
  std::size_t quorum() const noexcept { return quorum_; }

  ScoreConfig with_tau(double tau) const;

 private:
  std::vector<WeightedSignal> utility_;
  std::vector<WeightedSignal> redundancy_;
  double tau_ = 0.5;
  CandidateThresholds candidate_;
  std::size_t quorum_ = 2;
};

// (1 - h)(1 - mi); both inputs must lie in [0, 1].
double product_ballast_score(double norm_entropy, double norm_mi);

// sum_k w_k (1 - U_k) + sum_r lambda_r R_r.
double weighted_ballast_score(std::span<const double> utility, std::span<const double> redundancy,
                              const ScoreConfig& config);

// Fraction of scores strictly above tau.
double dataset_ballast_index(std::span<const double> scores, double tau);

// Mask of features with score <= tau.
std::vector<bool> kept_mask(std::span<const double> scores, double tau);

// Keeps the columns with score <= tau, in their original order. Throws
// EmptyResultError when nothing survives.
Dataset prune(const Dataset& data, std::span<const double> scores, double tau);

bool candidate_rule(double mi, double h_norm, double var, const CandidateThresholds& t = {});

bool vote_ballast(const std::vector<bool>& flags, std::size_t quorum);

// ---------------------------------------------------------------------------
// Scoring a whole signal table

enum class ScoreForm { Weighted, Product, Candidate, External };

std::string_view to_string(ScoreForm form);
std::optional<ScoreForm> parse_score_form(std::string_view token);

struct ScoreInputs {
  std::string entropy_signal = "norm_entropy";
  std::string mi_signal = "mi";
  std::string variance_signal = "variance";
  std::string external_signal = "shap";
  double external_threshold = 0.0;
};

// One score per feature of `signals`, in table feature order.
//   Weighted  weighted_ballast_score on normalized values
//   Product   product_ballast_score on normalized entropy and MI
//   Candidate 1 when candidate_rule holds on raw MI, entropy and variance
//   External  1 when the raw external signal is below its threshold
std::vector<double> score_features(const SignalTable& signals, ScoreForm form,
                                   const ScoreConfig& config, const ScoreInputs& inputs = {});

struct BallastReport {
  ScoreForm form = ScoreForm::Weighted;
  std::vector<std::string> features;
  std::vector<double> scores;
  double tau = 0.0;
  double ballast_index = 0.0;
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  nlohmann::ordered_json config;
};

BallastReport make_report(std::vector<std::string> features, std::vector<double> scores,
                          ScoreForm form, const ScoreConfig& config,
                          nlohmann::ordered_json config_snapshot = nullptr);

nlohmann::ordered_json config_to_json(const ScoreConfig& config);
nlohmann::ordered_json report_to_json(const BallastReport& report);

}  // namespace ballast::score
