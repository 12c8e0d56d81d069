#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "miml/bench.hpp"
#include "miml/dataset_io.hpp"
#include "miml/scores_io.hpp"
#include "miml/split.hpp"
#include "miml/synth.hpp"
#include "support/test_util.hpp"

using namespace miml;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("miml_harness_" + std::to_string(::getpid()) +
                                                "_" + std::to_string(counter++))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const {
    return sub.empty() ? path.string() : (path / sub).string();
  }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// first instance of a single-label case is a cluster draw
bool far_apart(const Case& a, const Case& b) {
  return (a.bag.instance(0) - b.bag.instance(0)).norm() > 4.0;
}

}  // namespace

TEST_CASE("dataset round trip is exact") {
  const MIMLDataset d = testutil::make_d_easy();
  TempDir dir;
  save_dataset(d, dir.str());
  const MIMLDataset back = load_dataset(dir.str());
  CHECK(back == d);
  CHECK(dataset_fingerprint(back) == dataset_fingerprint(d));

  // saving the loaded copy reproduces the bytes
  TempDir dir2;
  save_dataset(back, dir2.str());
  CHECK(slurp(dir.str("cases.jsonl")) == slurp(dir2.str("cases.jsonl")));
  CHECK(slurp(dir.str("manifest.json")) == slurp(dir2.str("manifest.json")));
}

TEST_CASE("load_dataset reports the offending case and line") {
  TempDir dir;
  {
    std::ofstream mf(dir.str("manifest.json"));
    mf << R"({"format_version":1,"dim":3,"label_names":["a","b"],"provenance":""})";
    std::ofstream cf(dir.str("cases.jsonl"));
    cf << R"({"case_id":"good","expert_id":"e","labels":[0],"instances":[[1.0,2.0,3.0]]})"
       << "\n";
    cf << R"({"case_id":"short","expert_id":"e","labels":[1],"instances":[[1.0,2.0]]})"
       << "\n";
  }
  try {
    load_dataset(dir.str());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("short") != std::string::npos);
    CHECK(msg.find("dimension") != std::string::npos);
  }

  // malformed JSON names the line number
  {
    std::ofstream cf(dir.str("cases.jsonl"));
    cf << R"({"case_id":"good","expert_id":"e","labels":[0],"instances":[[1.0,2.0,3.0]]})"
       << "\n";
    cf << "{not json\n";
  }
  try {
    load_dataset(dir.str());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("empty cases file loads as an empty dataset") {
  TempDir dir;
  {
    std::ofstream mf(dir.str("manifest.json"));
    mf << R"({"format_version":1,"dim":3,"label_names":["a"],"provenance":""})";
    std::ofstream cf(dir.str("cases.jsonl"));
  }
  const MIMLDataset d = load_dataset(dir.str());
  CHECK(d.num_cases() == 0);
  CHECK(d.manifest.dim == 3);
}

TEST_CASE("generate_synthetic is deterministic and honors the config") {
  SynthConfig cfg;
  cfg.n_bags = 200;
  const MIMLDataset a = generate_synthetic(cfg, 99);
  CHECK(a.num_cases() == 200);
  CHECK(a.num_labels() == 5);
  CHECK(validate_dataset(a).empty());
  for (const Case& c : a.cases) CHECK_FALSE(c.labels.empty());

  TempDir d1, d2;
  save_dataset(a, d1.str());
  save_dataset(generate_synthetic(cfg, 99), d2.str());
  CHECK(slurp(d1.str("cases.jsonl")) == slurp(d2.str("cases.jsonl")));

  CHECK_FALSE(generate_synthetic(cfg, 100) == a);

  SynthConfig bad;
  bad.num_labels = 0;
  CHECK_THROWS_AS(generate_synthetic(bad, 1), std::invalid_argument);
}

TEST_CASE("synthetic label frequencies approach the configured marginals") {
  SynthConfig cfg;
  cfg.n_bags = 2000;
  cfg.num_labels = 5;
  const MIMLDataset d = generate_synthetic(cfg, 7);

  // P(l in Y) = sum_k P(|Y|=k) * k / L with uniform distinct label choice
  double expected = 0.0;
  for (std::size_t k = 0; k < cfg.cardinality_probs.size(); ++k)
    expected += cfg.cardinality_probs[k] * static_cast<double>(k + 1) / cfg.num_labels;

  const Eigen::MatrixXd y = d.label_matrix();
  for (int l = 0; l < cfg.num_labels; ++l) {
    const double freq = y.col(l).mean();
    CHECK(std::abs(freq - expected) < 0.05);
  }
}

TEST_CASE("synthetic centers respect the separation floor") {
  SynthConfig cfg;
  cfg.num_labels = 11;  // more labels than dimensions
  cfg.dim = 4;
  cfg.n_bags = 50;
  cfg.center_separation = 5.0;
  cfg.sigma = 0.01;
  const MIMLDataset d = generate_synthetic(cfg, 3);
  // cluster instances of distinct labels stay far apart when sigma is tiny
  for (const Case& a : d.cases)
    for (const Case& b : d.cases) {
      if (a.labels == b.labels || a.labels.size() != 1 || b.labels.size() != 1) continue;
      CHECK(far_apart(a, b));
    }
}

TEST_CASE("stratified_split partitions, balances, and drops empty-label cases") {
  SynthConfig cfg;
  cfg.n_bags = 199;
  MIMLDataset d = generate_synthetic(cfg, 21);

  // sprinkle in three unlabeled cases
  for (int i = 0; i < 3; ++i) {
    Case c;
    c.case_id = "unlabeled-" + std::to_string(i);
    c.expert_id = "synth";
    c.bag = d.cases.front().bag;
    d.cases.push_back(c);
  }

  const SplitResult split = stratified_split(d, 0.5, 31);
  CHECK(split.dropped_empty_label_cases == 3);
  CHECK(split.train.num_cases() + split.test.num_cases() == 199);

  // disjoint by case_id, covering all labelled cases
  std::set<std::string> seen;
  for (const Case& c : split.train.cases) seen.insert(c.case_id);
  for (const Case& c : split.test.cases) CHECK(seen.insert(c.case_id).second);
  CHECK(static_cast<int>(seen.size()) == 199);

  // per-label balance within +-1 of the fractional target
  const Eigen::MatrixXd y_all = d.label_matrix();
  const Eigen::MatrixXd y_train = split.train.label_matrix();
  for (int l = 0; l < d.num_labels(); ++l) {
    const double target = 0.5 * y_all.col(l).sum();
    CHECK(std::abs(y_train.col(l).sum() - target) <= 1.0);
  }

  // determinism
  const SplitResult again = stratified_split(d, 0.5, 31);
  CHECK(again.train == split.train);
  CHECK(again.test == split.test);

  CHECK_THROWS_AS(stratified_split(d, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(d, 1.0, 1), std::invalid_argument);
}

TEST_CASE("single-label fixture splits exactly 10 +- 1 per label at fraction 0.5") {
  MIMLDataset d;
  d.manifest.dim = 1;
  d.manifest.label_names = {"a", "b", "c"};
  int id = 0;
  Rng rng(17);
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 20; ++i) {
      Case c;
      c.case_id = "case-" + std::to_string(id++);
      c.expert_id = "x";
      Eigen::MatrixXd inst(1, 1);
      inst << rng.uniform(0.0, 1.0) + 10.0 * l;
      c.bag = Bag{inst};
      c.labels = LabelSet({l});
      d.cases.push_back(std::move(c));
    }
  const SplitResult split = stratified_split(d, 0.5, 5);
  const Eigen::MatrixXd y_train = split.train.label_matrix();
  for (int l = 0; l < 3; ++l) CHECK(std::abs(y_train.col(l).sum() - 10.0) <= 1.0);
}

TEST_CASE("scores CSV round trip preserves values exactly") {
  std::vector<ScoreRow> rows;
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    ScoreRow r;
    r.case_id = "case-" + std::to_string(i);
    r.scores = testutil::random_vector(rng, 4);
    for (int l = 0; l < 4; ++l)
      if (rng.uniform01() < 0.5) r.decided.add(l);
    if (r.decided.empty()) r.decided.add(0);
    rows.push_back(std::move(r));
  }
  TempDir dir;
  const std::string path = dir.str("scores.csv");
  write_scores_csv(path, rows, 4);
  const std::vector<ScoreRow> back = read_scores_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].case_id == rows[i].case_id);
    CHECK(back[i].scores == rows[i].scores);  // %.17g survives the round trip
    CHECK(back[i].decided == rows[i].decided);
  }

  CHECK_THROWS_AS(read_scores_csv(dir.str("missing.csv")), DataError);
}

TEST_CASE("benchmark runs all six, orders rows, and leaves data untouched") {
  const MIMLDataset d = testutil::make_d_easy();
  const std::uint64_t before_train = dataset_fingerprint(d);

  std::map<std::string, std::string> overrides;
  overrides["max_iters"] = "300";  // keep the gradient learners quick here
  const BenchReport report =
      run_benchmark(d, d, {Algo::kM3Miml, Algo::kKisar}, overrides, 3);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].name == "M3MIML");
  CHECK(report.rows[1].name == "KISAR");
  for (const BenchRow& row : report.rows) {
    CHECK(row.ok);
    CHECK(row.wall_seconds >= 0.0);
    CHECK(row.report.average_precision > 0.5);
  }
  CHECK(dataset_fingerprint(d) == before_train);

  // failed rows carry the error instead of aborting
  MIMLDataset tiny = d;
  tiny.cases.resize(2);
  const BenchReport failed = run_benchmark(tiny, tiny, {Algo::kMimlKnn}, {}, 3);
  REQUIRE(failed.rows.size() == 1);
  CHECK_FALSE(failed.rows[0].ok);
  CHECK(failed.rows[0].error.find("train_miml_knn") != std::string::npos);

  // mismatched manifests are rejected up front
  MIMLDataset other = d;
  other.manifest.label_names = {"x", "y"};
  CHECK_THROWS_AS(run_benchmark(d, other, {Algo::kMimlKnn}, {}, 3), std::invalid_argument);
}

TEST_CASE("emit_report renders the table shape and a parseable CSV") {
  BenchReport report;
  for (Algo a : all_algos()) {
    BenchRow row;
    row.name = algo_display_name(a);
    row.algo_id = algo_id(a);
    row.ok = true;
    row.seed = 7;
    row.wall_seconds = 0.25;
    row.report.hamming_loss = 0.203;
    row.report.one_error = 0.261;
    row.report.ranking_loss = 0.570;
    row.report.coverage = 0.856;
    row.report.average_precision = 0.653;
    row.report.n_hamming = 153;
    row.report.n_one_error = 153;
    row.report.n_ranking_loss = 150;
    row.report.n_coverage = 153;
    row.report.n_average_precision = 153;
    row.params = nlohmann::json{{"r", 10}, {"c", 20}};
    report.rows.push_back(std::move(row));
  }

  const std::string text = emit_report(report, ReportFormat::kText);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line.find("Algorithms") == 0);
  CHECK(line.find("h.l.") != std::string::npos);
  CHECK(line.find("a.p.") != std::string::npos);
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find("0.203") != std::string::npos);
    CHECK(line.find("0.653") != std::string::npos);
  }
  CHECK(rows == 6);
  CHECK(text.find("MIML-kNN      0.203  0.261  0.570  0.856  0.653") != std::string::npos);

  const std::string csv = emit_report(report, ReportFormat::kCsv);
  std::istringstream csv_lines(csv);
  std::getline(csv_lines, line);
  CHECK(line.find("algorithm,seed,wall_seconds,hamming_loss") == 0);
  int csv_rows = 0;
  while (std::getline(csv_lines, line))
    if (!line.empty()) ++csv_rows;
  CHECK(csv_rows == 6);
  // full precision survives a parse-back
  CHECK(csv.find("0.20300000000000001") != std::string::npos);

  // empty report: header only
  CHECK(emit_report(BenchReport{}, ReportFormat::kText).find("Algorithms") == 0);
}

TEST_CASE("algorithm selection parsing") {
  CHECK(parse_algo_selection("all").size() == 6);
  const auto two = parse_algo_selection("kisar,mimlknn");
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Algo::kMimlKnn);  // fixed report order, not input order
  CHECK(two[1] == Algo::kKisar);
  CHECK_THROWS_AS(parse_algo_selection("mimlknn,bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_algo_selection(""), std::invalid_argument);

  CHECK_THROWS_AS(validate_algo_overrides(Algo::kMimlKnn, {{"alpha", "0.1"}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_algo_overrides(Algo::kMimlRbf, {{"alpha", "0.2"}, {"distance", "max"}}));
}

TEST_CASE("train_algo honors distance and parameter overrides") {
  const MIMLDataset d = testutil::make_d_easy();
  std::map<std::string, std::string> overrides;
  overrides["r"] = "3";
  overrides["c"] = "3";
  overrides["distance"] = "max";
  const auto model = train_algo(Algo::kMimlKnn, d, overrides, 11);
  CHECK(model->params().at("r").get<int>() == 3);
  CHECK(model->params().at("distance").get<std::string>() == "max");
}
