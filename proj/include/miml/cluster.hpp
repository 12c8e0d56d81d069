#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "miml/types.hpp"

namespace miml {

struct KMedoidsResult {
  std::vector<int> medoids;     // members of the item set
  std::vector<int> assignment;  // item -> index into `medoids`
  double cost = 0.0;            // sum of distances to the assigned medoid
  std::vector<double> cost_trace;  // cost after build and after each applied swap
};

// PAM-style clustering over an abstract pairwise distance. Greedy build from
// a seeded shuffle, then first-improvement swaps until a local optimum.
KMedoidsResult k_medoids(int n_items, const std::function<double(int, int)>& dist, int k,
                         std::uint64_t seed);

struct KMeansResult {
  Eigen::MatrixXd centroids;    // k rows
  std::vector<int> assignment;  // vector -> centroid row
  double inertia = 0.0;         // within-cluster sum of squares
  std::vector<double> inertia_trace;
};

// Lloyd iterations with seeded k-means++ initialization. Empty clusters are
// re-seeded from the point farthest from its assigned centroid.
KMeansResult k_means(const Eigen::MatrixXd& vectors, int k, std::uint64_t seed,
                     int max_iters = 100);

}  // namespace miml
