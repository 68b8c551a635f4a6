#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "ballast/error.hpp"
#include "ballast/pipeline.hpp"
#include "ballast/score.hpp"
#include "test_support.hpp"

using namespace ballast;
using namespace ballast::pipeline;
namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(testing::slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// `informative` noisy predictors of a binary label plus `constants` constant
// columns, then the label.
std::string synthetic_csv(std::size_t n, std::size_t informative, std::size_t constants, std::uint64_t seed) {
  testing::Gen g(seed);
  std::ostringstream out;
  for (std::size_t j = 0; j < informative; ++j) out << "x" << j << ",";
  for (std::size_t j = 0; j < constants; ++j) out << "k" << j << ",";
  out << "label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int y = g.coin(0.5);
    for (std::size_t j = 0; j < informative; ++j) out << (y ? 0.8 : -0.8) + g.normal() << ",";
    for (std::size_t j = 0; j < constants; ++j) out << 7 << ",";
    out << y << "\n";
  }
  return out.str();
}

std::string boilerplate_corpus() {
  const std::vector<std::string> bodies = {
      "Neurons fire spikes across cortical layers.", "Glaciers retreat under warming summers.",
      "Compilers optimize loops through vectorization.", "Bees pollinate orchards during spring bloom.",
      "Telescopes resolve distant galaxies clearly.", "Rivers carry sediment toward coastal deltas.",
      "Enzymes catalyze reactions inside living cells.", "Volcanoes erupt molten basalt rock.",
      "Satellites relay signals around orbit.", "Farmers rotate crops preserving soil nutrients.",
      "Whales migrate across cold oceans.", "Bridges distribute loads through steel trusses."};
  std::ostringstream out;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    out << Json{{"id", "d" + std::to_string(i)},
                {"title", ""},
                {"abstract", ""},
                {"body", bodies[i] + " All rights reserved."}}
               .dump()
        << "\n";
  }
  return out.str();
}

PipelineConfig structured(const testing::TempDir& dir, const std::string& csv) {
  auto cfg = preset("structured");
  cfg.input = dir.write("data.csv", csv);
  cfg.target = "label";
  cfg.out = dir.path() / "out";
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BALLAST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("presets and overlays") {
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name));
    CHECK_THROWS_AS(preset("nope"), ConfigError);
    const auto base = preset("structured");
    CHECK(base.score.tau() == 0.5);
    CHECK(base.score.candidate().mi_max == 0.01);
    CHECK(base.taus.size() == 21);

    const auto cfg = apply_config(Json::parse(R"({"score": {"tau": 0.3, "quorum": 3},
        "selectors": [{"name": "variance", "threshold": 0.1, "mode": "signal"}], "seed": 9})"),
                                  base, "/tmp/base");
    CHECK(cfg.score.tau() == 0.3);
    CHECK(cfg.score.quorum() == 3);
    CHECK(cfg.selectors.size() == 1);
    CHECK_FALSE(cfg.selectors[0].veto);
    CHECK(cfg.seed == 9);
  }

  TEST_CASE("rejections") {
    const auto base = preset("structured");
    CHECK_THROWS_AS(apply_config(Json::parse(R"({"bogus": 1})"), base, {}), ConfigError);
    CHECK_THROWS_AS(apply_config(Json::parse(R"({"score": {"tau": "high"}})"), base, {}), ConfigError);
    CHECK_THROWS_AS(apply_config(Json::parse(R"({"sweep": {"taus": [0.5, 0.1]}})"), base, {}), ConfigError);
    CHECK_THROWS_AS(apply_config(Json::parse(R"({"selectors": [{"name": "magic"}]})"), base, {}), ConfigError);
    CHECK_THROWS_AS(
        apply_config(Json::parse(R"({"score": {"utility_weights": {"mi": 0.5}, "redundancy_weights": {}}})"), base, {}),
        ConfigError);
  }
}

TEST_SUITE("profile") {
  TEST_CASE("one row per feature; constants flagged; MI with a target") {
    testing::TempDir dir("cli_profile");
    auto cfg = structured(dir, synthetic_csv(200, 3, 1, 1));
    const auto paths = cmd_profile(cfg);
    const auto rows = read_lines(paths.at(0));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "feature,kind,entropy_bits,norm_entropy,variance,sparsity,mi,empty_support,constant,candidate,sparse");
    CHECK(rows[4].rfind("k0,numeric,0,0,0,0,0,0,1,1,0", 0) == 0);
    CHECK(rows[1].find(",,") == std::string::npos);

    cfg.target.reset();
    const auto no_target = read_lines(cmd_profile(cfg).at(0));
    CHECK(no_target.size() == 6);  // label becomes a feature
    CHECK(no_target[1].find(",,") != std::string::npos);
  }
}

TEST_SUITE("score and prune") {
  TEST_CASE("product preset matches the score module") {
    testing::TempDir dir("cli_score");
    auto cfg = structured(dir, synthetic_csv(300, 4, 2, 2));
    cfg.selectors.clear();
    cfg.candidate_veto = false;
    const auto scored = score_dataset(cfg);
    const auto expected = score::score_features(scored.signals, score::ScoreForm::Product, cfg.score);
    CHECK(scored.scores == expected);
    cmd_score(cfg);
    const auto report = Json::parse(testing::slurp(cfg.out / "ballast_report.json"));
    CHECK(report["form"] == "product");
    CHECK(report["n_features"] == 6);
    CHECK(report["scores"][0]["score"].get<double>() == expected[0]);
  }

  TEST_CASE("candidate rule drops exactly the ten constants") {
    testing::TempDir dir("cli_candidate");
    auto cfg = structured(dir, synthetic_csv(500, 40, 10, 3));
    cfg.selectors.clear();
    cfg.form = score::ScoreForm::Candidate;
    cmd_prune(cfg);
    const auto dropped = read_lines(cfg.out / "dropped_features.txt");
    REQUIRE(dropped.size() == 10);
    for (const auto& f : dropped) CHECK(f[0] == 'k');
    const auto header = read_lines(cfg.out / "pruned.csv").at(0);
    CHECK(header.find("k0") == std::string::npos);
    CHECK(header.find("label") != std::string::npos);
  }

  TEST_CASE("tau = 1 keeps every column") {
    testing::TempDir dir("cli_tau1");
    auto cfg = structured(dir, synthetic_csv(100, 3, 2, 4));
    cfg.score = cfg.score.with_tau(1.0);
    cmd_prune(cfg);
    CHECK(read_lines(cfg.out / "pruned.csv").at(0) == "x0,x1,x2,k0,k1,label");
  }

  TEST_CASE("tau below every score is an empty result") {
    testing::TempDir dir("cli_empty");
    auto cfg = structured(dir, synthetic_csv(100, 2, 2, 5));
    cfg.form = score::ScoreForm::Candidate;
    cfg.selectors.clear();
    cfg.score = cfg.score.with_tau(0.0);
    // every feature a candidate: loosen the thresholds
    cfg.score = score::ScoreConfig({}, {}, 0.0, {10, 10, 10});
    CHECK_THROWS_WITH_AS(cmd_prune(cfg), doctest::Contains("empty result"), EmptyResultError);
  }

  TEST_CASE("ingested SHAP drives the external form") {
    testing::TempDir dir("cli_shap");
    auto cfg = structured(dir, synthetic_csv(100, 3, 0, 6));
    cfg.selectors.clear();
    cfg.form = score::ScoreForm::External;
    cfg.inputs.external_threshold = 0.05;
    cfg.signals = {dir.write("shap.csv",
                             "feature_id,signal,kind,value\nx0,shap,utility,0.3\nx1,shap,utility,0.01\n"
                             "x2,shap,utility,0.2\n")};
    cmd_score(cfg);
    CHECK(read_lines(cfg.out / "dropped_features.txt") == std::vector<std::string>{"x1"});
  }

  TEST_CASE("missing signal file") {
    testing::TempDir dir("cli_missing");
    auto cfg = structured(dir, synthetic_csv(50, 2, 0, 7));
    cfg.signals = {dir.path() / "absent.csv"};
    CHECK_THROWS_AS(cmd_score(cfg), DataError);
  }
}

TEST_SUITE("sweep, storage, text") {
  TEST_CASE("sweep writes one row per tau") {
    testing::TempDir dir("cli_sweep");
    auto cfg = structured(dir, synthetic_csv(300, 4, 2, 8));
    cfg.taus = {0.0, 0.5, 1.0};
    const auto rows = read_lines(cmd_sweep(cfg).at(0));
    CHECK(rows.size() == 4);
  }

  TEST_CASE("storage") {
    testing::TempDir dir("cli_storage");
    auto cfg = structured(dir, synthetic_csv(50, 2, 1, 9));
    const auto j = Json::parse(testing::slurp(cmd_storage(cfg).at(0)));
    CHECK(j["dense_bytes"] == 50 * 3 * 8);
  }

  TEST_CASE("boilerplate is voted out; quorum 5 removes nothing") {
    testing::TempDir dir("cli_text");
    auto cfg = preset("unstructured");
    cfg.input = dir.write("corpus.jsonl", boilerplate_corpus());
    cfg.out = dir.path() / "out";
    cfg.text.lda_topics = 3;
    cfg.text.lda_iterations = 50;
    cmd_text(cfg);
    const auto filtered = testing::slurp(cfg.out / "filtered_corpus.jsonl");
    CHECK(filtered.find("rights reserved") == std::string::npos);
    CHECK(filtered.find("Whales migrate") != std::string::npos);

    cfg.text.quorum = 5;
    cmd_text(cfg);
    const auto summary = Json::parse(testing::slurp(cfg.out / "text_summary.json"));
    CHECK(summary["sentences_removed"] == 0);
    CHECK(summary["reduction_ratio"] == 0.0);
  }

  TEST_CASE("modality guards") {
    testing::TempDir dir("cli_guard");
    auto cfg = structured(dir, synthetic_csv(20, 1, 0, 10));
    CHECK_THROWS_AS(cmd_text(cfg), ConfigError);
    cfg.modality = Modality::Unstructured;
    CHECK_THROWS_AS(cmd_profile(cfg), ConfigError);
  }
}

TEST_SUITE("executable") {
  TEST_CASE("exit codes") {
    testing::TempDir dir("cli_exit");
    const auto data = dir.write("d.csv", synthetic_csv(80, 2, 1, 11));
    const auto out = (dir.path() / "o").string();
    const std::string common = " --input " + data.string() + " --target label --out " + out;
    CHECK(run_cli("profile" + common) == 0);
    CHECK(run_cli("score" + common + " --preset nope") == 2);
    CHECK(run_cli("score --config " + dir.write("bad.json", R"({"unknown": 1})").string() + common) == 2);
    CHECK(run_cli("score --config " + dir.write("broken.json", "{").string() + common) == 2);
    CHECK(run_cli("profile --input " + (dir.path() / "missing.csv").string() + " --out " + out) == 3);
    const auto all_candidates =
        dir.write("cand.json", R"({"score": {"form": "candidate", "candidate": {"mi_max": 9, "h_max": 9, "var_max": 9}},
                                   "selectors": []})");
    CHECK(run_cli("prune --config " + all_candidates.string() + common + " --tau 0") == 4);
    CHECK(run_cli("frobnicate") == 2);
  }

  TEST_CASE("reruns are byte-identical") {
    testing::TempDir dir("cli_det");
    const auto data = dir.write("d.csv", synthetic_csv(150, 3, 1, 12));
    for (const char* sub : {"profile", "score", "prune", "sweep", "storage"}) {
      const auto a = (dir.path() / (std::string(sub) + "_a")).string();
      const auto b = (dir.path() / (std::string(sub) + "_b")).string();
      const std::string args = std::string(sub) + " --input " + data.string() + " --target label --seed 3";
      REQUIRE(run_cli(args + " --out " + a) == 0);
      REQUIRE(run_cli(args + " --out " + b + " --threads 2") == 0);
      for (const auto& entry : fs::directory_iterator(a)) {
        INFO(sub << "/" << entry.path().filename().string());
        CHECK(testing::slurp(entry.path()) == testing::slurp(fs::path(b) / entry.path().filename()));
      }
    }
  }
}
