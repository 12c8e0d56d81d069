#pragma once

#include <cstdint>
#include <vector>

#include "miml/types.hpp"

namespace miml {

// Synthetic MIML generator: well-separated Gaussian clusters per label plus
// background instances near the origin, so ground truth is exactly the set
// of generating clusters.
struct SynthConfig {
  int n_bags = 200;
  int num_labels = 5;
  int dim = 8;
  int instances_per_label = 3;
  int background_instances = 2;
  double sigma = 0.5;
  double center_separation = 5.0;
  // P(|Y| = k) for k = 1, 2, ...; truncated at num_labels and renormalized.
  std::vector<double> cardinality_probs = {0.6, 0.3, 0.1};
};

MIMLDataset generate_synthetic(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace miml
