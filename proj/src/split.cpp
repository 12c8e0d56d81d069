#include "miml/split.hpp"

#include <cmath>
#include <stdexcept>

#include "miml/rng.hpp"

namespace miml {

SplitResult stratified_split(const MIMLDataset& d, double train_fraction,
                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1)");
  if (d.num_cases() < 2)
    throw std::invalid_argument("stratified_split: need at least two cases");

  SplitResult res;
  res.train.manifest = d.manifest;
  res.test.manifest = d.manifest;

  std::vector<int> labelled;
  for (int i = 0; i < d.num_cases(); ++i) {
    if (d.cases[static_cast<std::size_t>(i)].labels.empty())
      ++res.dropped_empty_label_cases;
    else
      labelled.push_back(i);
  }

  const int L = d.num_labels();
  std::vector<int> total_positive(static_cast<std::size_t>(L), 0);
  for (int i : labelled)
    for (int l : d.cases[static_cast<std::size_t>(i)].labels.values())
      ++total_positive[static_cast<std::size_t>(l)];
  std::vector<double> train_target(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l)
    train_target[static_cast<std::size_t>(l)] =
        train_fraction * total_positive[static_cast<std::size_t>(l)];

  Rng rng(seed);
  rng.shuffle(labelled);

  // Greedy per-label balance: each case goes to whichever side still needs
  // its labels more.
  std::vector<int> train_count(static_cast<std::size_t>(L), 0);
  std::vector<int> test_count(static_cast<std::size_t>(L), 0);
  int n_train = 0, n_test = 0;
  for (int i : labelled) {
    const Case& c = d.cases[static_cast<std::size_t>(i)];
    double need_train = 0.0, need_test = 0.0;
    for (int l : c.labels.values()) {
      const auto lu = static_cast<std::size_t>(l);
      need_train += std::max(0.0, train_target[lu] - train_count[lu]);
      need_test +=
          std::max(0.0, (total_positive[lu] - train_target[lu]) - test_count[lu]);
    }
    bool to_train;
    if (need_train > need_test)
      to_train = true;
    else if (need_test > need_train)
      to_train = false;
    else
      to_train = n_train <= n_test;  // tie: keep overall sizes close
    if (to_train) {
      res.train.cases.push_back(c);
      ++n_train;
      for (int l : c.labels.values()) ++train_count[static_cast<std::size_t>(l)];
    } else {
      res.test.cases.push_back(c);
      ++n_test;
      for (int l : c.labels.values()) ++test_count[static_cast<std::size_t>(l)];
    }
  }
  return res;
}

}  // namespace miml
