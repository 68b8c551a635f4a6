#include "ballast/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ballast/error.hpp"

namespace ballast::score {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DataError(std::string(what) + " must lie in [0, 1], got " + format_number(v));
  }
}

void require_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1], got " + format_number(tau));
}

nlohmann::ordered_json weights_json(const std::vector<WeightedSignal>& ws) {
  auto out = nlohmann::ordered_json::object();
  for (const auto& w : ws) out[w.signal] = w.weight;
  return out;
}

}  // namespace

SignalTable normalize_signals(SignalTable table) {
  std::map<std::string, std::pair<double, double>, std::less<>> range;
  for (const auto& e : table.entries()) {
    if (!std::isfinite(e.raw_value)) {
      throw DataError("signal '" + e.signal + "' of '" + e.feature_id + "' is not finite");
    }
    auto [it, fresh] = range.try_emplace(e.signal, e.raw_value, e.raw_value);
    if (!fresh) {
      it->second.first = std::min(it->second.first, e.raw_value);
      it->second.second = std::max(it->second.second, e.raw_value);
    }
  }
  for (auto& e : table.mutable_entries()) {
    const auto [lo, hi] = range.at(e.signal);
    e.normalized_value = hi > lo ? std::clamp((e.raw_value - lo) / (hi - lo), 0.0, 1.0) : 0.5;
  }
  return table;
}

ScoreConfig::ScoreConfig(std::vector<WeightedSignal> utility, std::vector<WeightedSignal> redundancy,
                         double tau, CandidateThresholds candidate, std::size_t quorum)
    : utility_(std::move(utility)),
      redundancy_(std::move(redundancy)),
      tau_(tau),
      candidate_(candidate),
      quorum_(quorum) {
  require_tau(tau_);
  if (quorum_ < 1) throw ConfigError("quorum must be at least 1");
  double total = 0.0;
  for (const auto* group : {&utility_, &redundancy_}) {
    for (const auto& w : *group) {
      if (!(w.weight >= 0.0) || !std::isfinite(w.weight)) {
        throw ConfigError("weight for '" + w.signal + "' must be finite and nonnegative");
      }
      total += w.weight;
    }
  }
  if (has_weights() && std::abs(total - 1.0) > kWeightSumTolerance) {
    throw ConfigError("utility and redundancy weights must sum to 1, got " + format_number(total));
  }
}

std::vector<double> ScoreConfig::utility_weights() const {
  std::vector<double> w;
  for (const auto& u : utility_) w.push_back(u.weight);
  return w;
}

std::vector<double> ScoreConfig::redundancy_weights() const {
  std::vector<double> w;
  for (const auto& r : redundancy_) w.push_back(r.weight);
  return w;
}

ScoreConfig ScoreConfig::with_tau(double tau) const {
  return ScoreConfig(utility_, redundancy_, tau, candidate_, quorum_);
}

double product_ballast_score(double norm_entropy, double norm_mi) {
  require_unit(norm_entropy, "normalized entropy");
  require_unit(norm_mi, "normalized MI");
  return (1.0 - norm_entropy) * (1.0 - norm_mi);
}

double weighted_ballast_score(std::span<const double> utility, std::span<const double> redundancy,
                              const ScoreConfig& config) {
  if (!config.has_weights()) throw ConfigError("weighted score needs utility or redundancy weights");
  if (utility.size() != config.utility().size() || redundancy.size() != config.redundancy().size()) {
    throw DataError("signal vector lengths (" + std::to_string(utility.size()) + ", " +
                    std::to_string(redundancy.size()) + ") do not match weight counts (" +
                    std::to_string(config.utility().size()) + ", " +
                    std::to_string(config.redundancy().size()) + ")");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < utility.size(); ++k) {
    require_unit(utility[k], "utility signal");
    s += config.utility()[k].weight * (1.0 - utility[k]);
  }
  for (std::size_t r = 0; r < redundancy.size(); ++r) {
    require_unit(redundancy[r], "redundancy signal");
    s += config.redundancy()[r].weight * redundancy[r];
  }
  return std::clamp(s, 0.0, 1.0);
}

double dataset_ballast_index(std::span<const double> scores, double tau) {
  if (scores.empty()) throw DataError("ballast index of an empty score list");
  std::size_t above = 0;
  for (double s : scores) {
    require_unit(s, "score");
    if (s > tau) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(scores.size());
}

std::vector<bool> kept_mask(std::span<const double> scores, double tau) {
  std::vector<bool> keep(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) keep[j] = scores[j] <= tau;
  return keep;
}

Dataset prune(const Dataset& data, std::span<const double> scores, double tau) {
  if (scores.size() != data.n_features()) {
    throw DataError("got " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(data.n_features()) + " features");
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] <= tau) keep.push_back(j);
  }
  if (keep.empty()) {
    double lowest = std::numeric_limits<double>::infinity();
    for (double s : scores) lowest = std::min(lowest, s);
    throw EmptyResultError("empty result: every feature scores above tau=" + format_number(tau) +
                           "; raise tau to at least " + format_number(lowest));
  }
  return data.select(keep);
}

bool candidate_rule(double mi, double h_norm, double var, const CandidateThresholds& t) {
  return mi < t.mi_max && h_norm < t.h_max && var < t.var_max;
}

bool vote_ballast(const std::vector<bool>& flags, std::size_t quorum) {
  if (quorum < 1) throw ConfigError("quorum must be at least 1");
  const auto votes = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  return votes >= quorum;
}

std::string_view to_string(ScoreForm form) {
  switch (form) {
    case ScoreForm::Weighted: return "weighted";
    case ScoreForm::Product: return "product";
    case ScoreForm::Candidate: return "candidate";
    case ScoreForm::External: return "external";
  }
  return "weighted";
}

std::optional<ScoreForm> parse_score_form(std::string_view token) {
  for (auto f : {ScoreForm::Weighted, ScoreForm::Product, ScoreForm::Candidate, ScoreForm::External}) {
    if (token == to_string(f)) return f;
  }
  return std::nullopt;
}

std::vector<double> score_features(const SignalTable& signals, ScoreForm form,
                                   const ScoreConfig& config, const ScoreInputs& inputs) {
  const std::size_t m = signals.features().size();
  if (m == 0) throw DataError("signal table has no features");
  std::vector<double> scores(m, 0.0);

  switch (form) {
    case ScoreForm::Weighted: {
      const SignalTable norm = normalize_signals(signals);
      std::vector<std::vector<double>> u, r;
      for (const auto& w : config.utility()) u.push_back(norm.normalized_column(w.signal));
      for (const auto& w : config.redundancy()) r.push_back(norm.normalized_column(w.signal));
      std::vector<double> uj(u.size()), rj(r.size());
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < u.size(); ++k) uj[k] = u[k][j];
        for (std::size_t k = 0; k < r.size(); ++k) rj[k] = r[k][j];
        scores[j] = weighted_ballast_score(uj, rj, config);
      }
      break;
    }
    case ScoreForm::Product: {
      const SignalTable norm = normalize_signals(signals);
      const auto h = norm.normalized_column(inputs.entropy_signal);
      const auto mi = norm.normalized_column(inputs.mi_signal);
      for (std::size_t j = 0; j < m; ++j) scores[j] = product_ballast_score(h[j], mi[j]);
      break;
    }
    case ScoreForm::Candidate: {
      const auto mi = signals.raw_column(inputs.mi_signal);
      const auto h = signals.raw_column(inputs.entropy_signal);
      const auto var = signals.raw_column(inputs.variance_signal);
      for (std::size_t j = 0; j < m; ++j) {
        scores[j] = candidate_rule(mi[j], h[j], var[j], config.candidate()) ? 1.0 : 0.0;
      }
      break;
    }
    case ScoreForm::External: {
      const auto v = signals.raw_column(inputs.external_signal);
      for (std::size_t j = 0; j < m; ++j) scores[j] = v[j] < inputs.external_threshold ? 1.0 : 0.0;
      break;
    }
  }
  return scores;
}

BallastReport make_report(std::vector<std::string> features, std::vector<double> scores,
                          ScoreForm form, const ScoreConfig& config,
                          nlohmann::ordered_json config_snapshot) {
  if (features.size() != scores.size()) throw DataError("feature and score counts differ");
  BallastReport r;
  r.form = form;
  r.tau = config.tau();
  r.ballast_index = dataset_ballast_index(scores, r.tau);
  for (std::size_t j = 0; j < features.size(); ++j) {
    (scores[j] <= r.tau ? r.kept : r.dropped).push_back(features[j]);
  }
  r.features = std::move(features);
  r.scores = std::move(scores);
  r.config = config_snapshot.is_null() ? config_to_json(config) : std::move(config_snapshot);
  return r;
}

nlohmann::ordered_json config_to_json(const ScoreConfig& config) {
  nlohmann::ordered_json j;
  j["utility_weights"] = weights_json(config.utility());
  j["redundancy_weights"] = weights_json(config.redundancy());
  j["tau"] = config.tau();
  j["candidate"] = {{"mi_max", config.candidate().mi_max},
                    {"h_max", config.candidate().h_max},
                    {"var_max", config.candidate().var_max}};
  j["quorum"] = config.quorum();
  return j;
}

nlohmann::ordered_json report_to_json(const BallastReport& report) {
  nlohmann::ordered_json j;
  j["form"] = std::string(to_string(report.form));
  j["tau"] = report.tau;
  j["ballast_index"] = report.ballast_index;
  j["n_features"] = report.features.size();
  j["n_dropped"] = report.dropped.size();
  auto scores = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < report.features.size(); ++k) {
    scores.push_back({{"feature", report.features[k]},
                      {"score", report.scores[k]},
                      {"ballast", report.scores[k] > report.tau}});
  }
  j["scores"] = std::move(scores);
  j["kept"] = report.kept;
  j["dropped"] = report.dropped;
  j["config"] = report.config;
  return j;
}

}  // namespace ballast::score
