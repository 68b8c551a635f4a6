#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ballast {

enum class SignalKind { Utility, Redundancy };

std::string_view to_string(SignalKind kind);
std::optional<SignalKind> parse_signal_kind(std::string_view token);

struct SignalEntry {
  std::string feature_id;
  std::string signal;
  SignalKind kind = SignalKind::Utility;
  double raw_value = 0.0;
  std::optional<double> normalized_value;
};

// Per-feature named signals. Features keep first-insertion order, which is
// the tie-break order for every selector that ranks features.
class SignalTable {
 public:
  // Throws DataError on a duplicate (feature_id, signal) pair or when the
  // signal was already registered with a different kind.
  void add(std::string feature_id, std::string signal, SignalKind kind, double raw_value);
  void merge(const SignalTable& other);

  const std::vector<SignalEntry>& entries() const noexcept { return entries_; }
  std::vector<SignalEntry>& mutable_entries() noexcept { return entries_; }

  const std::vector<std::string>& features() const noexcept { return features_; }
  std::vector<std::string> signal_names() const;
  std::optional<SignalKind> kind_of(std::string_view signal) const;

  const SignalEntry* find(std::string_view feature_id, std::string_view signal) const;
  bool has_signal(std::string_view signal) const;

  // Raw values of one signal in feature order; throws DataError naming the
  // first feature without an entry.
  std::vector<double> raw_column(std::string_view signal) const;
  std::vector<double> normalized_column(std::string_view signal) const;

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<SignalEntry> entries_;
  std::vector<std::string> features_;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
  std::map<std::string, SignalKind, std::less<>> kinds_;
};

// CSV with header `feature_id,signal,kind,value`.
SignalTable ingest_signals(std::istream& in);
SignalTable ingest_signals(const std::filesystem::path& path);

void write_signals_csv(std::ostream& out, const SignalTable& table);

}  // namespace ballast
