#pragma once

// Brute-force metric oracles written straight from the definitions, kept
// independent of the library's rank-vector machinery.

#include <optional>
#include <vector>

#include "miml/rng.hpp"
#include "miml/types.hpp"

namespace miml::testutil {

// rank by direct counting: 1 + #labels strictly better (ties favor the
// smaller index)
inline int oracle_rank(const Eigen::VectorXd& scores, int label) {
  int rank = 1;
  for (int l = 0; l < scores.size(); ++l) {
    if (l == label) continue;
    if (scores(l) > scores(label) || (scores(l) == scores(label) && l < label)) ++rank;
  }
  return rank;
}

inline double oracle_hamming(const std::vector<LabelSet>& decided,
                             const std::vector<LabelSet>& truth, int L) {
  double total = 0.0;
  for (std::size_t i = 0; i < decided.size(); ++i) {
    int diff = 0;
    for (int l = 0; l < L; ++l)
      if (decided[i].contains(l) != truth[i].contains(l)) ++diff;
    total += static_cast<double>(diff) / L;
  }
  return total / static_cast<double>(decided.size());
}

inline std::optional<double> oracle_one_error(const std::vector<Eigen::VectorXd>& scores,
                                              const std::vector<LabelSet>& truth) {
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    int top = 0;
    for (int l = 1; l < scores[i].size(); ++l)
      if (scores[i](l) > scores[i](top)) top = l;
    total += truth[i].contains(top) ? 0.0 : 1.0;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

inline std::optional<double> oracle_coverage(const std::vector<Eigen::VectorXd>& scores,
                                             const std::vector<LabelSet>& truth) {
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    int worst = 0;
    for (int y : truth[i].values()) worst = std::max(worst, oracle_rank(scores[i], y));
    total += worst - 1;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

inline std::optional<double> oracle_ranking_loss(const std::vector<Eigen::VectorXd>& scores,
                                                 const std::vector<LabelSet>& truth) {
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int L = static_cast<int>(scores[i].size());
    if (truth[i].empty() || truth[i].size() == L) continue;
    int bad = 0, pairs = 0;
    for (int y = 0; y < L; ++y) {
      if (!truth[i].contains(y)) continue;
      for (int o = 0; o < L; ++o) {
        if (truth[i].contains(o)) continue;
        ++pairs;
        if (scores[i](y) <= scores[i](o)) ++bad;
      }
    }
    total += static_cast<double>(bad) / pairs;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

inline std::optional<double> oracle_average_precision(
    const std::vector<Eigen::VectorXd>& scores, const std::vector<LabelSet>& truth) {
  double total = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i].empty()) continue;
    double acc = 0.0;
    for (int y : truth[i].values()) {
      const int ry = oracle_rank(scores[i], y);
      int above = 0;
      for (int o : truth[i].values())
        if (oracle_rank(scores[i], o) <= ry) ++above;
      acc += static_cast<double>(above) / ry;
    }
    total += acc / truth[i].size();
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

// Random evaluation case: occasional score ties, truth sets ranging from
// empty to full.
struct MetricCase {
  Eigen::VectorXd scores;
  LabelSet truth;
};

inline MetricCase random_metric_case(Rng& rng, int max_labels = 6) {
  MetricCase c;
  const int L = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_labels - 1)));
  c.scores.resize(L);
  for (int l = 0; l < L; ++l) c.scores(l) = rng.uniform(-1.0, 1.0);
  if (rng.uniform01() < 0.25) {
    // inject a tie
    const int a = static_cast<int>(rng.uniform_int(L));
    const int b = static_cast<int>(rng.uniform_int(L));
    c.scores(a) = c.scores(b);
  }
  for (int l = 0; l < L; ++l)
    if (rng.uniform01() < 0.4) c.truth.add(l);
  return c;
}

}  // namespace miml::testutil
