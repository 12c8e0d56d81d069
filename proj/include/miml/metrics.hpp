#pragma once

#include <stdexcept>
#include <vector>

#include "miml/types.hpp"

namespace miml {

// Raised when a metric's average would run over zero cases (for example
// one-error with every truth set empty).
class UndefinedMetricError : public std::runtime_error {
 public:
  explicit UndefinedMetricError(const std::string& what) : std::runtime_error(what) {}
};

// ranks[l] in 1..L, 1 = best. Higher score wins; ties go to the smaller
// label index.
using RankVector = std::vector<int>;

RankVector rank_labels(const Eigen::VectorXd& scores);

// (1/N) * sum_i |decided_i symdiff truth_i| / L
double hamming_loss(const std::vector<LabelSet>& decided, const std::vector<LabelSet>& truth,
                    int num_labels);

// Fraction of cases whose top-ranked label is not a proper label. Cases with
// empty truth are excluded from the average.
double one_error(const std::vector<Eigen::VectorXd>& scores,
                 const std::vector<LabelSet>& truth);

// Mean number of ranking steps needed to cover every proper label, minus one.
double coverage(const std::vector<Eigen::VectorXd>& scores,
                const std::vector<LabelSet>& truth);

// Mean fraction of (proper, improper) label pairs with score_proper <=
// score_improper. Only cases with 0 < |truth| < L contribute.
double ranking_loss(const std::vector<Eigen::VectorXd>& scores,
                    const std::vector<LabelSet>& truth);

// Mean over proper labels y of the fraction of proper labels ranked at or
// above y, averaged over cases with non-empty truth.
double average_precision(const std::vector<Eigen::VectorXd>& scores,
                         const std::vector<LabelSet>& truth);

// One row of the comparison table: the five metrics plus how many cases
// entered each average.
struct EvalReport {
  double hamming_loss = 0.0;
  double one_error = 0.0;
  double ranking_loss = 0.0;
  double coverage = 0.0;
  double average_precision = 0.0;
  int n_hamming = 0;
  int n_one_error = 0;
  int n_ranking_loss = 0;
  int n_coverage = 0;
  int n_average_precision = 0;
};

EvalReport evaluate_all(const std::vector<Eigen::VectorXd>& scores,
                        const std::vector<LabelSet>& decided,
                        const std::vector<LabelSet>& truth, int num_labels);

}  // namespace miml
