#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ballast/core/corpus_io.hpp"
#include "ballast/core/csv.hpp"
#include "ballast/core/dataset.hpp"
#include "ballast/core/jsonl.hpp"
#include "ballast/core/signals.hpp"
#include "ballast/core/sparse.hpp"
#include "ballast/error.hpp"
#include "test_support.hpp"

using namespace ballast;

namespace {

Dataset csv_from(const std::string& text, const CsvLoadOptions& options = {}) {
  std::istringstream in(text);
  return dataset_from_table(parse_csv(in), options);
}

JsonlLoadResult jsonl_from(const std::string& text, const JsonlOptions& options = {}) {
  std::istringstream in(text);
  return flatten_jsonl(in, options);
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("3x2 table infers numeric with a missing cell and a categorical column") {
    const auto d = csv_from("a,b\n1,x\n2,y\n,z\n");
    REQUIRE(d.n_rows() == 3);
    CHECK(d.column("a").kind == ColumnKind::Numeric);
    CHECK(d.column("a").missing_count() == 1);
    CHECK(d.column("a").is_missing(2));
    CHECK(d.column("b").kind == ColumnKind::Categorical);
    CHECK(d.column("b").levels.size() == 3);
  }

  TEST_CASE("empty file has no header") {
    std::istringstream in("");
    CHECK_THROWS_WITH_AS(parse_csv(in), "no header", DataError);
  }

  TEST_CASE("NA token in a numeric column is missing") {
    const auto d = csv_from("v\n1\n2\nNA\n4\n");
    CHECK(d.column("v").kind == ColumnKind::Numeric);
    CHECK(d.column("v").missing_count() == 1);
    CHECK(d.column("v").is_missing(2));
  }

  TEST_CASE("a stray token under the 10% budget is coerced to missing") {
    std::string text = "v\n";
    for (int i = 0; i < 19; ++i) text += std::to_string(i) + "\n";
    text += "oops\n";
    const auto d = csv_from(text);
    CHECK(d.column("v").kind == ColumnKind::Numeric);
    CHECK(d.column("v").is_missing(19));
  }

  TEST_CASE("ragged rows and duplicate headers are rejected") {
    std::istringstream ragged("a,b\n1\n");
    CHECK_THROWS_AS(parse_csv(ragged), DataError);
    CHECK_THROWS_AS(csv_from("a,a\n1,2\n"), DataError);
  }

  TEST_CASE("quoted fields keep commas, quotes and newlines") {
    std::istringstream in("t,n\n\"x, \"\"y\"\"\nz\",1\n");
    const auto table = parse_csv(in);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0][0] == "x, \"y\"\nz");
    std::ostringstream out;
    write_csv_row(out, table.rows[0]);
    std::istringstream back("t,n\n" + out.str());
    CHECK(parse_csv(back).rows[0] == table.rows[0]);
  }

  TEST_CASE("unterminated quote") {
    std::istringstream in("a\n\"open\n");
    CHECK_THROWS_AS(parse_csv(in), DataError);
  }

  TEST_CASE("schema override and target selection") {
    CsvLoadOptions o;
    o.schema["code"] = ColumnKind::Categorical;
    o.target = "y";
    const auto d = csv_from("code,y\n1,0\n2,1\n1,1\n", o);
    CHECK(d.column("code").kind == ColumnKind::Categorical);
    REQUIRE(d.has_target());
    CHECK(d.n_features() == 1);
    CHECK(d.target()->kind == TargetKind::Classification);
    CHECK(d.target()->class_count() == 2);
  }

  TEST_CASE("dataset round-trips through CSV with the target last") {
    CsvLoadOptions o;
    o.target = "y";
    const auto d = csv_from("y,a,b\n1,0.5,x\n0,,y\n", o);
    std::ostringstream out;
    write_dataset_csv(out, d);
    CHECK(out.str() == "a,b,y\n0.5,x,1\n,y,0\n");
  }
}

TEST_SUITE("jsonl") {
  TEST_CASE("nested keys flatten to dotted names") {
    const auto r = jsonl_from("{\"a\":{\"b\":1}}\n");
    REQUIRE(r.data.n_features() == 1);
    CHECK(r.data.column(0).name == "a.b");
    CHECK(r.data.column(0).numeric[0] == 1.0);
  }

  TEST_CASE("absent key gives a missing cell") {
    const auto r = jsonl_from("{\"id\":1,\"price\":9.5}\n{\"id\":2}\n{\"id\":3}\n");
    const auto& price = r.data.column("price");
    CHECK(price.missing_count() == 2);
    CHECK_FALSE(price.is_missing(0));
  }

  TEST_CASE("list policies") {
    const std::string line = "{\"tags\":[\"x\",\"y\"]}\n";
    const auto joined = jsonl_from(line);
    CHECK(joined.data.column("tags").kind == ColumnKind::Text);
    CHECK(joined.data.column("tags").text[0] == "x y");

    JsonlOptions count;
    count.list_policy = ListPolicy::Count;
    CHECK(jsonl_from(line, count).data.column("tags").numeric[0] == 2.0);

    JsonlOptions drop;
    drop.list_policy = ListPolicy::Drop;
    CHECK(jsonl_from("{\"tags\":[1]}\n", drop).data.n_features() == 0);
    CHECK(jsonl_from("{\"k\":1,\"tags\":[1]}\n", drop).data.n_features() == 1);
  }

  TEST_CASE("column order follows first appearance") {
    const auto r = jsonl_from("{\"b\":1,\"a\":{\"z\":1,\"y\":2}}\n{\"c\":3,\"b\":2}\n");
    CHECK(r.data.feature_names() == std::vector<std::string>{"b", "a.z", "a.y", "c"});
  }

  TEST_CASE("malformed lines are fatal with a line number unless skipped") {
    const std::string text = "{\"a\":1}\n{oops\n{\"a\":3}\n";
    CHECK_THROWS_WITH_AS(jsonl_from(text), doctest::Contains("line 2"), DataError);
    JsonlOptions skip;
    skip.skip_malformed = true;
    const auto r = jsonl_from(text, skip);
    CHECK(r.data.n_rows() == 2);
    CHECK(r.warnings.size() == 1);
  }
}

TEST_SUITE("corpus io") {
  TEST_CASE("min_words drops short documents") {
    std::string long_body;
    for (int i = 0; i < 120; ++i) long_body += "word ";
    std::string short_body;
    for (int i = 0; i < 50; ++i) short_body += "word ";
    std::istringstream in(long_body + "\n" + short_body + "\n");
    const auto c = load_corpus(in, CorpusFormat::PlainLines, 100);
    CHECK(c.docs.size() == 1);
    CHECK(c.dropped == 1);
  }

  TEST_CASE("min_words 0 keeps non-empty docs and empty docs are always excluded") {
    std::istringstream in("one\ntwo three\n");
    CHECK(load_corpus(in, CorpusFormat::PlainLines, 0).docs.size() == 2);
    std::istringstream with_empty("{\"id\":\"a\",\"body\":\"x y\"}\n{\"id\":\"b\",\"body\":\"\"}\n");
    const auto c = load_corpus(with_empty, CorpusFormat::Jsonl, 1);
    CHECK(c.docs.size() == 1);
    CHECK(c.dropped == 1);
  }

  TEST_CASE("zero surviving documents is an error") {
    std::istringstream in("a b\n");
    CHECK_THROWS_AS(load_corpus(in, CorpusFormat::PlainLines, 10), DataError);
  }

  TEST_CASE("JSONL corpus keeps fields and round-trips") {
    std::istringstream in("{\"id\":\"d1\",\"title\":\"T\",\"abstract\":\"A b.\",\"body\":\"B c d.\"}\n");
    const auto c = load_corpus(in, CorpusFormat::Jsonl, 0);
    REQUIRE(c.docs.size() == 1);
    CHECK(c.docs[0].title == "T");
    std::ostringstream out;
    write_corpus_jsonl(out, c.docs);
    std::istringstream back(out.str());
    const auto again = load_corpus(back, CorpusFormat::Jsonl, 0);
    CHECK(again.docs[0].body == "B c d.");
    CHECK(again.docs[0].abstract == "A b.");
  }
}

TEST_SUITE("signals") {
  TEST_CASE("ingest utility and redundancy entries") {
    std::istringstream in("feature_id,signal,kind,value\nf1,shap,utility,0.012\nf2,cosine_max,redundancy,0.97\n");
    const auto t = ingest_signals(in);
    REQUIRE(t.size() == 2);
    CHECK(t.find("f1", "shap")->kind == SignalKind::Utility);
    CHECK(t.find("f1", "shap")->raw_value == doctest::Approx(0.012));
    CHECK(t.find("f2", "cosine_max")->kind == SignalKind::Redundancy);
  }

  TEST_CASE("duplicate pair and unknown kind are errors") {
    std::istringstream dup("feature_id,signal,kind,value\nf1,shap,utility,1\nf1,shap,utility,2\n");
    CHECK_THROWS_AS(ingest_signals(dup), DataError);
    std::istringstream bad("feature_id,signal,kind,value\nf1,shap,useful,1\n");
    CHECK_THROWS_AS(ingest_signals(bad), DataError);
  }

  TEST_CASE("raw_column names the first feature without an entry") {
    SignalTable t;
    t.add("a", "mi", SignalKind::Utility, 0.1);
    t.add("b", "shap", SignalKind::Utility, 0.2);
    CHECK_THROWS_WITH_AS(t.raw_column("mi"), doctest::Contains("'b'"), DataError);
  }
}

TEST_SUITE("sparse") {
  TEST_CASE("storage byte model") {
    const auto empty = storage_bytes(100, 100, 0);
    CHECK(empty.dense_bytes == 80000);
    CHECK(empty.csr_bytes == 404);

    const auto full = storage_bytes(100, 100, 10000);
    CHECK(full.csr_bytes > full.dense_bytes);
    CHECK(full.savings_percent < 0.0);

    // 254 * 12 + 101 * 4 = 3452 bytes against 80,000.
    const auto paper = storage_bytes(100, 100, 254);
    CHECK(paper.csr_bytes == 3452);
    CHECK(paper.savings_percent == doctest::Approx(95.685).epsilon(1e-12));
  }

  TEST_CASE("savings strictly decrease in nnz") {
    double previous = 101.0;
    for (std::size_t nnz = 0; nnz <= 2500; nnz += 1) {
      const double s = storage_bytes(50, 50, nnz).savings_percent;
      REQUIRE(s < previous);
      previous = s;
    }
  }

  TEST_CASE("dense to CSR to dense round-trip drops explicit zeros") {
    testing::Gen g(7);
    for (int trial = 0; trial < 200; ++trial) {
      const auto rows = static_cast<std::size_t>(g.integer(0, 12));
      const auto cols = static_cast<std::size_t>(g.integer(1, 12));
      std::vector<double> dense(rows * cols, 0.0);
      std::size_t nonzero = 0;
      for (auto& v : dense) {
        if (g.coin(0.3)) {
          v = g.normal();
          ++nonzero;
        }
      }
      const auto m = SparseMatrix::from_dense(rows, cols, dense);
      m.validate();
      REQUIRE(m.nnz() == nonzero);
      REQUIRE(m.to_dense() == dense);
    }
  }

  TEST_CASE("validate catches broken structure") {
    SparseMatrix m = SparseMatrix::from_dense(2, 3, std::vector<double>{1, 0, 2, 0, 3, 0});
    auto bad = m;
    bad.col_indices[1] = 0;  // row 0 now has columns 0, 0
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = m;
    bad.row_offsets.back() = 7;
    CHECK_THROWS_AS(bad.validate(), DataError);
  }

  TEST_CASE("builder sorts and merges columns") {
    SparseBuilder b(4);
    b.add_row({{3, 1.0}, {1, 2.0}, {3, 0.5}});
    b.add_row({});
    const auto m = std::move(b).finish();
    m.validate();
    CHECK(m.to_dense() == std::vector<double>{0, 2, 0, 1.5, 0, 0, 0, 0});
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("integral target with few levels is a classification target") {
    const auto d = csv_from("x,y\n1,0\n2,1\n3,2\n").with_target("y");
    CHECK(d.target()->kind == TargetKind::Classification);
    const auto r = csv_from("x,y\n1,0.5\n2,1.25\n3,2\n").with_target("y");
    CHECK(r.target()->kind == TargetKind::Regression);
  }

  TEST_CASE("missing target cell is a data error") {
    CHECK_THROWS_AS(csv_from("x,y\n1,0\n2,\n").with_target("y"), DataError);
  }

  TEST_CASE("number parsing") {
    CHECK(parse_number(" 1.5 ") == 1.5);
    CHECK(parse_number("+2") == 2.0);
    CHECK_FALSE(parse_number("inf"));
    CHECK_FALSE(parse_number("1x"));
    CHECK(format_number(0.1) == "0.1");
  }
}
