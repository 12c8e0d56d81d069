// miml: command-line front end for the MIML toolkit.
//
// Exit codes: 0 success, 2 usage error, 3 data validation error,
// 4 training/prediction failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miml/bench.hpp"
#include "miml/dataset_io.hpp"
#include "miml/learners.hpp"
#include "miml/lbp.hpp"
#include "miml/metrics.hpp"
#include "miml/model.hpp"
#include "miml/scores_io.hpp"
#include "miml/split.hpp"
#include "miml/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::map<std::string, std::string> parse_param_list(const std::vector<std::string>& params) {
  std::map<std::string, std::string> kv;
  for (const std::string& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--param expects key=value, got '" + p + "'");
    kv[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return kv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw miml::DataError(path + ": cannot open for writing");
  out << content;
  if (!out) throw miml::DataError(path + ": write failed");
}

int run_gen_synth(const std::string& out_dir, std::uint64_t seed, int bags, int labels,
                  int dim, double sigma, double sep) {
  miml::SynthConfig cfg;
  cfg.n_bags = bags;
  cfg.num_labels = labels;
  cfg.dim = dim;
  cfg.sigma = sigma;
  cfg.center_separation = sep;
  const miml::MIMLDataset d = miml::generate_synthetic(cfg, seed);
  miml::save_dataset(d, out_dir);
  std::cout << "wrote " << d.num_cases() << " cases to " << out_dir << "\n";
  return kExitOk;
}

// Optional per-case labels: {"label_names": [...], "cases": {"<case_dir>":
// {"labels": [0, 2], "expert_id": "E1"}}}. Without it every case gets the
// default vocabulary and an empty label set.
int run_extract(const std::string& images_dir, const std::string& out_dir,
                const std::string& stains_path, std::string labels_path) {
  const miml::StainMatrix stains = stains_path.empty()
                                       ? miml::StainMatrix::ruifrok_he()
                                       : miml::StainMatrix::load(stains_path);

  nlohmann::json labels_json;
  if (labels_path.empty()) {
    const fs::path fallback = fs::path(images_dir) / "labels.json";
    if (fs::exists(fallback)) labels_path = fallback.string();
  }
  if (!labels_path.empty()) {
    std::ifstream in(labels_path);
    if (!in) throw miml::DataError(labels_path + ": cannot open");
    try {
      in >> labels_json;
    } catch (const nlohmann::json::exception& e) {
      throw miml::DataError(labels_path + ": malformed JSON: " + e.what());
    }
  }

  miml::MIMLDataset d;
  d.manifest.dim = 256;
  d.manifest.label_names = labels_json.contains("label_names")
                               ? labels_json.at("label_names").get<std::vector<std::string>>()
                               : miml::kDefaultLabelNames;
  d.manifest.provenance = "extracted from " + images_dir;

  std::vector<fs::path> case_dirs;
  for (const auto& entry : fs::directory_iterator(images_dir))
    if (entry.is_directory()) case_dirs.push_back(entry.path());
  std::sort(case_dirs.begin(), case_dirs.end());
  if (case_dirs.empty())
    throw miml::DataError(images_dir + ": no case directories found");

  for (const fs::path& dir : case_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());  // lexicographic instance order
    if (files.empty()) {
      std::cerr << "warning: skipping case '" << dir.filename().string()
                << "' with no ROI images\n";
      continue;
    }
    std::vector<miml::RgbImage> rois;
    rois.reserve(files.size());
    for (const fs::path& f : files) rois.push_back(miml::read_image(f.string()));

    miml::Case c;
    c.case_id = dir.filename().string();
    c.expert_id = "unknown";
    c.bag = miml::extract_case_features(rois, stains);
    if (labels_json.contains("cases") && labels_json.at("cases").contains(c.case_id)) {
      const auto& entry = labels_json.at("cases").at(c.case_id);
      c.labels = miml::LabelSet(entry.at("labels").get<std::vector<int>>());
      c.expert_id = entry.value("expert_id", std::string("unknown"));
    }
    d.cases.push_back(std::move(c));
  }

  miml::save_dataset(d, out_dir);
  std::cout << "extracted " << d.num_cases() << " cases to " << out_dir << "\n";
  return kExitOk;
}

int run_split(const std::string& in_dir, const std::string& out_train,
              const std::string& out_test, double train_frac, std::uint64_t seed) {
  const miml::MIMLDataset d = miml::load_dataset(in_dir);
  const miml::SplitResult split = miml::stratified_split(d, train_frac, seed);
  miml::save_dataset(split.train, out_train);
  miml::save_dataset(split.test, out_test);
  std::cout << "train " << split.train.num_cases() << ", test " << split.test.num_cases()
            << ", dropped " << split.dropped_empty_label_cases << " empty-label cases\n";
  return kExitOk;
}

int run_train(const std::string& algo_name, const std::string& in_dir,
              const std::string& out_file, std::uint64_t seed,
              const std::vector<std::string>& params) {
  miml::Algo algo;
  std::map<std::string, std::string> overrides;
  try {
    algo = miml::algo_from_id(algo_name);
    overrides = parse_param_list(params);
    miml::validate_algo_overrides(algo, overrides);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const miml::MIMLDataset d = miml::load_dataset(in_dir);
  const std::unique_ptr<miml::Model> model = miml::train_algo(algo, d, overrides, seed);
  miml::save_model(*model, out_file);
  std::cout << "trained " << model->algorithm() << " on " << d.num_cases()
            << " cases, wrote " << out_file << "\n";
  return kExitOk;
}

int run_predict(const std::string& model_file, const std::string& in_dir,
                const std::string& out_file) {
  const std::unique_ptr<miml::Model> model = miml::load_model(model_file);
  const miml::MIMLDataset d = miml::load_dataset(in_dir);
  if (d.manifest.label_names != model->label_names())
    throw miml::DataError(in_dir + ": label vocabulary differs from the model's");
  std::vector<miml::ScoreRow> rows;
  rows.reserve(d.cases.size());
  for (const miml::Case& c : d.cases) {
    miml::Prediction p = miml::predict(*model, c.bag);
    rows.push_back({c.case_id, std::move(p.scores), std::move(p.decided)});
  }
  miml::write_scores_csv(out_file, rows, model->num_labels());
  std::cout << "scored " << rows.size() << " cases, wrote " << out_file << "\n";
  return kExitOk;
}

int run_eval(const std::string& scores_file, const std::string& truth_dir,
             const std::string& out_file) {
  const std::vector<miml::ScoreRow> rows = miml::read_scores_csv(scores_file);
  const miml::MIMLDataset truth_ds = miml::load_dataset(truth_dir);
  std::map<std::string, const miml::Case*> by_id;
  for (const miml::Case& c : truth_ds.cases) by_id[c.case_id] = &c;

  std::vector<Eigen::VectorXd> scores;
  std::vector<miml::LabelSet> decided, truth;
  for (const miml::ScoreRow& r : rows) {
    const auto it = by_id.find(r.case_id);
    if (it == by_id.end())
      throw miml::DataError(scores_file + ": case '" + r.case_id +
                            "' not present in the truth dataset");
    if (r.scores.size() != truth_ds.num_labels())
      throw miml::DataError(scores_file + ": case '" + r.case_id + "' has " +
                            std::to_string(r.scores.size()) + " scores but truth has " +
                            std::to_string(truth_ds.num_labels()) + " labels");
    scores.push_back(r.scores);
    decided.push_back(r.decided);
    truth.push_back(it->second->labels);
  }
  if (scores.empty()) throw miml::DataError(scores_file + ": no score rows");

  miml::BenchRow row;
  row.name = fs::path(scores_file).stem().string();
  row.algo_id = row.name;
  row.ok = true;
  row.report = miml::evaluate_all(scores, decided, truth, truth_ds.num_labels());
  miml::BenchReport report;
  report.rows.push_back(std::move(row));
  const std::string text = miml::emit_report(report, miml::ReportFormat::kText);
  write_text_file(out_file, text);
  std::cout << text;
  return kExitOk;
}

int run_bench(const std::string& train_dir, const std::string& test_dir,
              const std::string& algos_spec, std::uint64_t seed,
              const std::string& report_file, const std::string& format,
              const std::vector<std::string>& params) {
  std::vector<miml::Algo> algos;
  std::map<std::string, std::string> overrides;
  miml::ReportFormat fmt;
  try {
    algos = miml::parse_algo_selection(algos_spec);
    overrides = parse_param_list(params);
    if (algos.size() == 1) miml::validate_algo_overrides(algos.front(), overrides);
    if (format == "text")
      fmt = miml::ReportFormat::kText;
    else if (format == "csv")
      fmt = miml::ReportFormat::kCsv;
    else
      throw UsageError("--format must be text or csv");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const miml::MIMLDataset train = miml::load_dataset(train_dir);
  const miml::MIMLDataset test = miml::load_dataset(test_dir);
  const miml::BenchReport report = miml::run_benchmark(train, test, algos, overrides, seed);
  const std::string body = miml::emit_report(report, fmt);
  write_text_file(report_file, body);
  std::cout << miml::emit_report(report, miml::ReportFormat::kText);

  for (const miml::BenchRow& row : report.rows)
    if (!row.ok) {
      std::cerr << "error: " << row.name << " failed: " << row.error << "\n";
      return kExitTraining;
    }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-instance multi-label learning toolkit"};
  app.require_subcommand(1);

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic MIML dataset");
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  int gen_bags = 200, gen_labels = 5, gen_dim = 8;
  double gen_sigma = 0.5, gen_sep = 5.0;
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--bags", gen_bags, "Number of cases")->required();
  gen->add_option("--labels", gen_labels, "Vocabulary size")->required();
  gen->add_option("--dim", gen_dim, "Instance dimension")->required();
  gen->add_option("--sigma", gen_sigma, "Cluster spread");
  gen->add_option("--sep", gen_sep, "Minimum center separation");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract LBP features from ROI images");
  std::string ex_images, ex_out, ex_stains, ex_labels;
  extract->add_option("--images", ex_images, "Directory with one subdirectory per case")
      ->required();
  extract->add_option("--out", ex_out, "Output dataset directory")->required();
  extract->add_option("--stains", ex_stains, "Stain vector JSON (default: built-in H&E)");
  extract->add_option("--labels", ex_labels,
                      "Case label JSON (default: <images>/labels.json if present)");

  // split
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  std::string sp_in, sp_train, sp_test;
  double sp_frac = 0.5;
  std::uint64_t sp_seed = 0;
  split->add_option("--in", sp_in, "Input dataset directory")->required();
  split->add_option("--out-train", sp_train, "Training output directory")->required();
  split->add_option("--out-test", sp_test, "Test output directory")->required();
  split->add_option("--train-frac", sp_frac, "Training fraction in (0,1)")->required();
  split->add_option("--seed", sp_seed, "RNG seed")->required();

  // train
  auto* train = app.add_subcommand("train", "Train one algorithm");
  std::string tr_algo, tr_in, tr_out;
  std::uint64_t tr_seed = 0;
  std::vector<std::string> tr_params;
  train->add_option("--algo", tr_algo, "mimlknn|mimlrbf|mimlsvm|mimlboost|m3miml|kisar")
      ->required();
  train->add_option("--in", tr_in, "Training dataset directory")->required();
  train->add_option("--out", tr_out, "Model output file")->required();
  train->add_option("--seed", tr_seed, "RNG seed")->required();
  train->add_option("--param", tr_params, "Parameter override key=value (repeatable)");

  // predict
  auto* pred = app.add_subcommand("predict", "Score a dataset with a trained model");
  std::string pr_model, pr_in, pr_out;
  pred->add_option("--model", pr_model, "Model file")->required();
  pred->add_option("--in", pr_in, "Dataset directory to score")->required();
  pred->add_option("--out", pr_out, "Scores CSV output file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a scores CSV against truth labels");
  std::string ev_scores, ev_truth, ev_out;
  eval->add_option("--scores", ev_scores, "Scores CSV file")->required();
  eval->add_option("--truth", ev_truth, "Truth dataset directory")->required();
  eval->add_option("--out", ev_out, "Report output file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Train and evaluate a set of algorithms");
  std::string be_train, be_test, be_algos = "all", be_report, be_format = "text";
  std::uint64_t be_seed = 0;
  std::vector<std::string> be_params;
  bench->add_option("--train", be_train, "Training dataset directory")->required();
  bench->add_option("--test", be_test, "Test dataset directory")->required();
  bench->add_option("--algos", be_algos, "'all' or comma-separated algorithm ids");
  bench->add_option("--seed", be_seed, "RNG seed")->required();
  bench->add_option("--report", be_report, "Report output file")->required();
  bench->add_option("--format", be_format, "text|csv");
  bench->add_option("--param", be_params, "Parameter override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed())
      return run_gen_synth(gen_out, gen_seed, gen_bags, gen_labels, gen_dim, gen_sigma,
                           gen_sep);
    if (extract->parsed()) return run_extract(ex_images, ex_out, ex_stains, ex_labels);
    if (split->parsed()) return run_split(sp_in, sp_train, sp_test, sp_frac, sp_seed);
    if (train->parsed()) return run_train(tr_algo, tr_in, tr_out, tr_seed, tr_params);
    if (pred->parsed()) return run_predict(pr_model, pr_in, pr_out);
    if (eval->parsed()) return run_eval(ev_scores, ev_truth, ev_out);
    if (bench->parsed())
      return run_bench(be_train, be_test, be_algos, be_seed, be_report, be_format,
                       be_params);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const miml::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const miml::UndefinedMetricError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  }
  return kExitUsage;
}
