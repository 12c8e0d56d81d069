#pragma once

#include <cstdint>

#include "miml/types.hpp"

namespace miml {

struct SplitResult {
  MIMLDataset train;
  MIMLDataset test;
  int dropped_empty_label_cases = 0;
};

// Disjoint partition of the labelled cases, balanced per label: greedy
// assignment over a seeded shuffle keeps each label's positive count in
// train within +-1 of fraction * total where feasible. Cases with empty
// label sets are dropped first.
SplitResult stratified_split(const MIMLDataset& d, double train_fraction,
                             std::uint64_t seed);

}  // namespace miml
