// ballast: find and prune low-utility features and sentences.
//
//   ballast profile --config run.json
//   ballast sweep --preset structured --input data.csv --target label --out results

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ballast/error.hpp"
#include "ballast/pipeline.hpp"

namespace {

using ballast::pipeline::PipelineConfig;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> preset;
  std::optional<std::string> input;
  std::optional<std::string> target;
  std::optional<double> tau;
  bool timing = false;
};

// Preset precedence: --preset, then the config's "preset", then the preset
// named after the config's modality, then "structured".
std::string choose_preset(const Flags& f, const nlohmann::ordered_json& doc) {
  if (f.preset) return *f.preset;
  if (doc.contains("preset") && doc["preset"].is_string()) return doc["preset"].get<std::string>();
  if (doc.contains("modality") && doc["modality"].is_string()) {
    const auto m = ballast::pipeline::parse_modality(doc["modality"].get<std::string>());
    if (m == ballast::pipeline::Modality::SemiStructured) return "semi";
    if (m) return std::string(ballast::pipeline::to_string(*m));
  }
  return "structured";
}

PipelineConfig build_config(const Flags& f) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  std::filesystem::path base_dir;
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw ballast::ConfigError("cannot read config file '" + *f.config + "'");
    try {
      doc = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ballast::ConfigError("config file '" + *f.config + "' is not valid JSON: " + e.what());
    }
    base_dir = std::filesystem::path(*f.config).parent_path();
  }
  auto cfg = ballast::pipeline::apply_config(doc, ballast::pipeline::preset(choose_preset(f, doc)), base_dir);
  if (f.input) cfg.input = *f.input;
  if (f.target) cfg.target = *f.target;
  if (f.out) cfg.out = *f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.tau) cfg.score = cfg.score.with_tau(*f.tau);
  if (f.timing) cfg.timing = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect and prune ballast in tabular and text data"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON pipeline config");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Random seed for splits, LDA and k-means");
  app.add_option("--threads", f.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--preset", f.preset, "structured | semi | unstructured | sparse")
      ->check(CLI::IsMember({"structured", "semi", "unstructured", "sparse"}));
  app.add_option("--input", f.input, "Input file (overrides the config)");
  app.add_option("--target", f.target, "Target column (overrides the config)");
  app.add_option("--tau", f.tau, "Pruning threshold (overrides the config)")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--timing", f.timing, "Record train_seconds in sweep output");

  using Command = std::vector<std::filesystem::path> (*)(const PipelineConfig&);
  Command command = nullptr;
  const std::pair<const char*, Command> commands[] = {
      {"profile", ballast::pipeline::cmd_profile}, {"score", ballast::pipeline::cmd_score},
      {"prune", ballast::pipeline::cmd_prune},     {"sweep", ballast::pipeline::cmd_sweep},
      {"text", ballast::pipeline::cmd_text},       {"storage", ballast::pipeline::cmd_storage},
  };
  const char* help[] = {"Per-feature entropy, variance, sparsity and MI",
                        "BallastScore report with kept/dropped lists",
                        "Write the dataset with ballast features removed",
                        "Metrics across pruning thresholds",
                        "Sentence-level ballast voting on a corpus",
                        "Dense vs CSR byte footprint"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->callback([&command, fn = commands[i].second] { command = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ballast::ErrorKind::Config);
  }

  try {
    const auto cfg = build_config(f);
    for (const auto& path : command(cfg)) std::cout << path.string() << "\n";
    return 0;
  } catch (const ballast::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
