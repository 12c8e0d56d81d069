#include "miml/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace miml {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* where) {
  if (a != b)
    throw std::invalid_argument(std::string(where) + ": length mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

void check_finite(const Eigen::VectorXd& scores, const char* where) {
  if (!scores.allFinite())
    throw std::invalid_argument(std::string(where) + ": non-finite score");
}

}  // namespace

RankVector rank_labels(const Eigen::VectorXd& scores) {
  check_finite(scores, "rank_labels");
  const int L = static_cast<int>(scores.size());
  std::vector<int> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](int a, int b) { return scores(a) > scores(b); });
  RankVector ranks(static_cast<std::size_t>(L));
  for (int pos = 0; pos < L; ++pos) ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos + 1;
  return ranks;
}

double hamming_loss(const std::vector<LabelSet>& decided, const std::vector<LabelSet>& truth,
                    int num_labels) {
  check_lengths(decided.size(), truth.size(), "hamming_loss");
  if (decided.empty()) throw std::invalid_argument("hamming_loss: no cases");
  if (num_labels < 1) throw std::invalid_argument("hamming_loss: vocabulary empty");
  double total = 0.0;
  for (std::size_t i = 0; i < decided.size(); ++i)
    total += static_cast<double>(decided[i].symmetric_difference_size(truth[i])) /
             static_cast<double>(num_labels);
  return total / static_cast<double>(decided.size());
}

double one_error(const std::vector<Eigen::VectorXd>& scores,
                 const std::vector<LabelSet>& truth) {
  check_lengths(scores.size(), truth.size(), "one_error");
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    const RankVector ranks = rank_labels(scores[i]);
    int top = 0;
    for (std::size_t l = 0; l < ranks.size(); ++l)
      if (ranks[l] == 1) top = static_cast<int>(l);
    total += truth[i].contains(top) ? 0.0 : 1.0;
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("one_error: every truth set is empty");
  return total / used;
}

double coverage(const std::vector<Eigen::VectorXd>& scores,
                const std::vector<LabelSet>& truth) {
  check_lengths(scores.size(), truth.size(), "coverage");
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    const RankVector ranks = rank_labels(scores[i]);
    int worst = 1;
    for (int y : truth[i].values())
      worst = std::max(worst, ranks[static_cast<std::size_t>(y)]);
    total += worst - 1;
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("coverage: every truth set is empty");
  return total / used;
}

double ranking_loss(const std::vector<Eigen::VectorXd>& scores,
                    const std::vector<LabelSet>& truth) {
  check_lengths(scores.size(), truth.size(), "ranking_loss");
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int L = static_cast<int>(scores[i].size());
    const int t = truth[i].size();
    if (t == 0 || t == L) continue;  // no (proper, improper) pairs to compare
    check_finite(scores[i], "ranking_loss");
    int misordered = 0;
    for (int y : truth[i].values())
      for (int other = 0; other < L; ++other) {
        if (truth[i].contains(other)) continue;
        if (scores[i](y) <= scores[i](other)) ++misordered;  // ties count as misordered
      }
    total += static_cast<double>(misordered) / (static_cast<double>(t) * (L - t));
    ++used;
  }
  if (used == 0)
    throw UndefinedMetricError("ranking_loss: no case with a proper/improper label pair");
  return total / used;
}

double average_precision(const std::vector<Eigen::VectorXd>& scores,
                         const std::vector<LabelSet>& truth) {
  check_lengths(scores.size(), truth.size(), "average_precision");
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    const RankVector ranks = rank_labels(scores[i]);
    double acc = 0.0;
    for (int y : truth[i].values()) {
      const int ry = ranks[static_cast<std::size_t>(y)];
      int at_or_above = 0;
      for (int other : truth[i].values())
        if (ranks[static_cast<std::size_t>(other)] <= ry) ++at_or_above;
      acc += static_cast<double>(at_or_above) / ry;
    }
    total += acc / truth[i].size();
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("average_precision: every truth set is empty");
  return total / used;
}

EvalReport evaluate_all(const std::vector<Eigen::VectorXd>& scores,
                        const std::vector<LabelSet>& decided,
                        const std::vector<LabelSet>& truth, int num_labels) {
  check_lengths(scores.size(), decided.size(), "evaluate_all");
  check_lengths(scores.size(), truth.size(), "evaluate_all");
  EvalReport r;
  r.hamming_loss = hamming_loss(decided, truth, num_labels);
  r.one_error = one_error(scores, truth);
  r.ranking_loss = ranking_loss(scores, truth);
  r.coverage = coverage(scores, truth);
  r.average_precision = average_precision(scores, truth);
  r.n_hamming = static_cast<int>(truth.size());
  int non_empty = 0, partial = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth[i].empty()) ++non_empty;
    if (truth[i].size() > 0 && truth[i].size() < static_cast<int>(scores[i].size()))
      ++partial;
  }
  r.n_one_error = non_empty;
  r.n_coverage = non_empty;
  r.n_average_precision = non_empty;
  r.n_ranking_loss = partial;
  return r;
}

}  // namespace miml
