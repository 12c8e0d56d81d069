#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "miml/metrics.hpp"
#include "miml/model.hpp"
#include "miml/types.hpp"

namespace miml {

enum class Algo { kMimlKnn, kMimlRbf, kMimlSvm, kMimlBoost, kM3Miml, kKisar };

// Fixed benchmark order; reports always list algorithms this way.
const std::vector<Algo>& all_algos();
const char* algo_id(Algo a);            // CLI identifier, e.g. "mimlknn"
const char* algo_display_name(Algo a);  // table name, e.g. "MIML-kNN"
Algo algo_from_id(const std::string& id);

// "all" or a comma-separated list of ids, kept in the fixed order.
std::vector<Algo> parse_algo_selection(const std::string& selection);

// Builds the algorithm's parameter set from defaults plus key=value
// overrides, then trains. Unknown keys are invalid-argument errors.
std::unique_ptr<Model> train_algo(Algo algo, const MIMLDataset& train,
                                  const std::map<std::string, std::string>& overrides,
                                  std::uint64_t seed);

// Same key checking without training, so callers can reject bad flags early.
void validate_algo_overrides(Algo algo, const std::map<std::string, std::string>& overrides);

struct BenchRow {
  std::string name;  // display name; the table's first column
  std::string algo_id;
  nlohmann::json params;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool ok = false;
  std::string error;
  EvalReport report;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Trains and evaluates each selected algorithm on the given split. Failures
// become failed rows rather than aborting the run.
BenchReport run_benchmark(const MIMLDataset& train, const MIMLDataset& test,
                          const std::vector<Algo>& algos,
                          const std::map<std::string, std::string>& overrides,
                          std::uint64_t seed);

enum class ReportFormat { kText, kCsv };

// Text mirrors the comparison-table presentation (3 decimals, no timing so
// repeated runs are byte-identical); CSV keeps full precision plus timings.
std::string emit_report(const BenchReport& report, ReportFormat format);

}  // namespace miml
