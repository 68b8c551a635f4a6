#include "ballast/core/signals.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "ballast/core/csv.hpp"
#include "ballast/core/dataset.hpp"
#include "ballast/error.hpp"

namespace ballast {

std::string_view to_string(SignalKind kind) {
  return kind == SignalKind::Utility ? "utility" : "redundancy";
}

std::optional<SignalKind> parse_signal_kind(std::string_view token) {
  if (token == "utility") return SignalKind::Utility;
  if (token == "redundancy") return SignalKind::Redundancy;
  return std::nullopt;
}

void SignalTable::add(std::string feature_id, std::string signal, SignalKind kind,
                      double raw_value) {
  if (auto it = kinds_.find(signal); it != kinds_.end() && it->second != kind) {
    throw DataError("signal '" + signal + "' registered as both utility and redundancy");
  }
  auto key = std::make_pair(feature_id, signal);
  if (index_.count(key)) {
    throw DataError("duplicate signal entry (" + feature_id + ", " + signal + ")");
  }
  if (std::find(features_.begin(), features_.end(), feature_id) == features_.end()) {
    features_.push_back(feature_id);
  }
  kinds_.emplace(signal, kind);
  index_.emplace(std::move(key), entries_.size());
  entries_.push_back({std::move(feature_id), std::move(signal), kind, raw_value, std::nullopt});
}

void SignalTable::merge(const SignalTable& other) {
  for (const auto& e : other.entries_) {
    add(e.feature_id, e.signal, e.kind, e.raw_value);
    if (e.normalized_value) entries_.back().normalized_value = e.normalized_value;
  }
}

std::vector<std::string> SignalTable::signal_names() const {
  std::vector<std::string> names;
  for (const auto& e : entries_) {
    if (std::find(names.begin(), names.end(), e.signal) == names.end()) names.push_back(e.signal);
  }
  return names;
}

std::optional<SignalKind> SignalTable::kind_of(std::string_view signal) const {
  auto it = kinds_.find(signal);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

const SignalEntry* SignalTable::find(std::string_view feature_id, std::string_view signal) const {
  auto it = index_.find(std::make_pair(std::string(feature_id), std::string(signal)));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool SignalTable::has_signal(std::string_view signal) const { return kinds_.count(signal) > 0; }

std::vector<double> SignalTable::raw_column(std::string_view signal) const {
  std::vector<double> out;
  out.reserve(features_.size());
  for (const auto& f : features_) {
    const auto* e = find(f, signal);
    if (!e) throw DataError("feature '" + f + "' has no '" + std::string(signal) + "' signal");
    out.push_back(e->raw_value);
  }
  return out;
}

std::vector<double> SignalTable::normalized_column(std::string_view signal) const {
  std::vector<double> out;
  out.reserve(features_.size());
  for (const auto& f : features_) {
    const auto* e = find(f, signal);
    if (!e) throw DataError("feature '" + f + "' has no '" + std::string(signal) + "' signal");
    if (!e->normalized_value) {
      throw DataError("signal '" + std::string(signal) + "' has not been normalized");
    }
    out.push_back(*e->normalized_value);
  }
  return out;
}

SignalTable ingest_signals(std::istream& in) {
  const CsvTable csv = parse_csv(in);
  const std::vector<std::string> expected = {"feature_id", "signal", "kind", "value"};
  if (csv.header != expected) {
    throw DataError("signal table header must be feature_id,signal,kind,value");
  }
  SignalTable table;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const auto kind = parse_signal_kind(row[2]);
    if (!kind) {
      throw DataError("unknown signal kind '" + row[2] + "' on row " + std::to_string(r + 2));
    }
    const auto value = parse_number(row[3]);
    if (!value) {
      throw DataError("non-numeric signal value '" + row[3] + "' on row " + std::to_string(r + 2));
    }
    table.add(row[0], row[1], *kind, *value);
  }
  return table;
}

SignalTable ingest_signals(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read signal file '" + path.string() + "'");
  return ingest_signals(in);
}

void write_signals_csv(std::ostream& out, const SignalTable& table) {
  write_csv_row(out, {"feature_id", "signal", "kind", "value", "normalized"});
  for (const auto& e : table.entries()) {
    write_csv_row(out, {e.feature_id, e.signal, std::string(to_string(e.kind)),
                        format_number(e.raw_value),
                        e.normalized_value ? format_number(*e.normalized_value) : ""});
  }
}

}  // namespace ballast
