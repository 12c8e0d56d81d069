#include "miml/bench.hpp"

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "miml/learners.hpp"

namespace miml {

namespace {

struct AlgoInfo {
  Algo algo;
  const char* id;
  const char* display;
};

constexpr AlgoInfo kAlgoTable[] = {
    {Algo::kMimlKnn, "mimlknn", "MIML-kNN"},   {Algo::kMimlRbf, "mimlrbf", "MIMLRBF"},
    {Algo::kMimlSvm, "mimlsvm", "MIMLSVM"},    {Algo::kMimlBoost, "mimlboost", "MIMLBOOST"},
    {Algo::kM3Miml, "m3miml", "M3MIML"},       {Algo::kKisar, "kisar", "KISAR"},
};

const AlgoInfo& info(Algo a) {
  for (const AlgoInfo& entry : kAlgoTable)
    if (entry.algo == a) return entry;
  throw std::logic_error("unknown algorithm enum value");
}

class OverrideReader {
 public:
  explicit OverrideReader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

  double number(const char* key, double fallback) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad value for parameter '") + key + "': '" +
                                  it->second + "'");
    }
  }

  int integer(const char* key, int fallback) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    used_.insert(key);
    try {
      return std::stoi(it->second);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad value for parameter '") + key + "': '" +
                                  it->second + "'");
    }
  }

  BagDistance distance() {
    const auto it = kv_.find("distance");
    if (it == kv_.end()) return BagDistance::kAvgHausdorff;
    used_.insert("distance");
    return bag_distance_from_string(it->second);
  }

  // Every provided key must belong to the algorithm being trained.
  void finish(const char* algo_id) const {
    for (const auto& [key, value] : kv_)
      if (used_.find(key) == used_.end())
        throw std::invalid_argument(std::string("unknown parameter '") + key + "' for " +
                                    algo_id);
  }

 private:
  const std::map<std::string, std::string>& kv_;
  std::set<std::string> used_;
};

struct KnnSetup {
  MimlKnnParams p;
  BagDistance dist;
};
struct RbfSetup {
  MimlRbfParams p;
  BagDistance dist;
};
struct SvmSetup {
  MimlSvmParams p;
  BagDistance dist;
};

KnnSetup assemble_knn(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  KnnSetup s;
  s.p.r = kv.integer("r", s.p.r);
  s.p.c = kv.integer("c", s.p.c);
  s.dist = kv.distance();
  kv.finish("mimlknn");
  return s;
}

RbfSetup assemble_rbf(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  RbfSetup s;
  s.p.alpha = kv.number("alpha", s.p.alpha);
  s.p.mu = kv.number("mu", s.p.mu);
  s.dist = kv.distance();
  kv.finish("mimlrbf");
  return s;
}

SvmSetup assemble_svm(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  SvmSetup s;
  s.p.ratio = kv.number("ratio", s.p.ratio);
  s.p.kernel.gamma = kv.number("gamma", s.p.kernel.gamma);
  s.p.cost = kv.number("cost", s.p.cost);
  s.dist = kv.distance();
  kv.finish("mimlsvm");
  return s;
}

MimlBoostParams assemble_boost(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  MimlBoostParams p;
  p.rounds = kv.integer("rounds", p.rounds);
  p.base_cost = kv.number("base_cost", p.base_cost);
  kv.finish("mimlboost");
  return p;
}

M3MimlParams assemble_m3(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  M3MimlParams p;
  p.cost = kv.number("cost", p.cost);
  p.max_iters = kv.integer("max_iters", p.max_iters);
  p.step = kv.number("step", p.step);
  kv.finish("m3miml");
  return p;
}

KisarParams assemble_kisar(const std::map<std::string, std::string>& overrides) {
  OverrideReader kv(overrides);
  KisarParams p;
  p.prototypes_per_label = kv.integer("prototypes_per_label", p.prototypes_per_label);
  p.similarity_gamma = kv.number("similarity_gamma", p.similarity_gamma);
  p.correlation_weight = kv.number("correlation_weight", p.correlation_weight);
  p.max_iters = kv.integer("max_iters", p.max_iters);
  kv.finish("kisar");
  return p;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += "\"\"";
    else
      out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

const std::vector<Algo>& all_algos() {
  static const std::vector<Algo> algos = {Algo::kMimlKnn,   Algo::kMimlRbf, Algo::kMimlSvm,
                                          Algo::kMimlBoost, Algo::kM3Miml,  Algo::kKisar};
  return algos;
}

const char* algo_id(Algo a) { return info(a).id; }

const char* algo_display_name(Algo a) { return info(a).display; }

Algo algo_from_id(const std::string& id) {
  for (const AlgoInfo& entry : kAlgoTable)
    if (id == entry.id) return entry.algo;
  throw std::invalid_argument("unknown algorithm '" + id +
                              "' (expected mimlknn|mimlrbf|mimlsvm|mimlboost|m3miml|kisar)");
}

std::vector<Algo> parse_algo_selection(const std::string& selection) {
  if (selection == "all") return all_algos();
  std::set<std::string> wanted;
  std::istringstream in(selection);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    algo_from_id(tok);  // validate
    wanted.insert(tok);
  }
  if (wanted.empty()) throw std::invalid_argument("empty algorithm selection");
  std::vector<Algo> out;
  for (Algo a : all_algos())
    if (wanted.count(algo_id(a))) out.push_back(a);
  return out;
}

void validate_algo_overrides(Algo algo, const std::map<std::string, std::string>& overrides) {
  switch (algo) {
    case Algo::kMimlKnn: assemble_knn(overrides); return;
    case Algo::kMimlRbf: assemble_rbf(overrides); return;
    case Algo::kMimlSvm: assemble_svm(overrides); return;
    case Algo::kMimlBoost: assemble_boost(overrides); return;
    case Algo::kM3Miml: assemble_m3(overrides); return;
    case Algo::kKisar: assemble_kisar(overrides); return;
  }
}

std::unique_ptr<Model> train_algo(Algo algo, const MIMLDataset& train,
                                  const std::map<std::string, std::string>& overrides,
                                  std::uint64_t seed) {
  switch (algo) {
    case Algo::kMimlKnn: {
      const KnnSetup s = assemble_knn(overrides);
      return train_miml_knn(train, s.p, s.dist, seed);
    }
    case Algo::kMimlRbf: {
      const RbfSetup s = assemble_rbf(overrides);
      return train_miml_rbf(train, s.p, s.dist, seed);
    }
    case Algo::kMimlSvm: {
      const SvmSetup s = assemble_svm(overrides);
      return train_miml_svm(train, s.p, s.dist, seed);
    }
    case Algo::kMimlBoost: return train_miml_boost(train, assemble_boost(overrides), seed);
    case Algo::kM3Miml: return train_m3miml(train, assemble_m3(overrides), seed);
    case Algo::kKisar: return train_kisar(train, assemble_kisar(overrides), seed);
  }
  throw std::logic_error("unreachable");
}

BenchReport run_benchmark(const MIMLDataset& train, const MIMLDataset& test,
                          const std::vector<Algo>& algos,
                          const std::map<std::string, std::string>& overrides,
                          std::uint64_t seed) {
  if (train.manifest.dim != test.manifest.dim ||
      train.manifest.label_names != test.manifest.label_names)
    throw std::invalid_argument("run_benchmark: train and test manifests differ");
  if (train.cases.empty()) throw std::invalid_argument("run_benchmark: empty training set");

  std::vector<LabelSet> truth;
  truth.reserve(test.cases.size());
  for (const Case& c : test.cases) truth.push_back(c.labels);

  BenchReport report;
  for (Algo a : algos) {
    BenchRow row;
    row.name = algo_display_name(a);
    row.algo_id = algo_id(a);
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::unique_ptr<Model> model = train_algo(a, train, overrides, seed);
      row.params = model->params();
      std::vector<Eigen::VectorXd> scores;
      std::vector<LabelSet> decided;
      scores.reserve(test.cases.size());
      for (const Case& c : test.cases) {
        Prediction p = predict(*model, c.bag);
        scores.push_back(std::move(p.scores));
        decided.push_back(std::move(p.decided));
      }
      row.report = evaluate_all(scores, decided, truth, test.num_labels());
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
  std::ostringstream out;
  char buf[256];
  if (format == ReportFormat::kText) {
    std::snprintf(buf, sizeof(buf), "%-12s %6s %6s %6s %6s %6s\n", "Algorithms", "h.l.",
                  "o.e.", "r.l.", "co.", "a.p.");
    out << buf;
    for (const BenchRow& row : report.rows) {
      if (row.ok) {
        std::snprintf(buf, sizeof(buf), "%-12s %6.3f %6.3f %6.3f %6.3f %6.3f\n",
                      row.name.c_str(), row.report.hamming_loss, row.report.one_error,
                      row.report.ranking_loss, row.report.coverage,
                      row.report.average_precision);
        out << buf;
      } else {
        std::snprintf(buf, sizeof(buf), "%-12s failed: %s\n", row.name.c_str(),
                      row.error.c_str());
        out << buf;
      }
    }
  } else {
    out << "algorithm,seed,wall_seconds,hamming_loss,one_error,ranking_loss,coverage,"
           "average_precision,n_hamming,n_one_error,n_ranking_loss,n_coverage,"
           "n_average_precision,status,error,params\n";
    for (const BenchRow& row : report.rows) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.wall_seconds);
      out << row.name << "," << row.seed << "," << buf << ",";
      if (row.ok) {
        const double vals[5] = {row.report.hamming_loss, row.report.one_error,
                                row.report.ranking_loss, row.report.coverage,
                                row.report.average_precision};
        for (double v : vals) {
          std::snprintf(buf, sizeof(buf), "%.17g", v);
          out << buf << ",";
        }
        out << row.report.n_hamming << "," << row.report.n_one_error << ","
            << row.report.n_ranking_loss << "," << row.report.n_coverage << ","
            << row.report.n_average_precision << ",ok,,";
      } else {
        out << ",,,,,,,,,,failed," << csv_quote(row.error) << ",";
      }
      out << csv_quote(row.params.is_null() ? std::string{} : row.params.dump()) << "\n";
    }
  }
  return out.str();
}

}  // namespace miml
