#pragma once

#include <string>
#include <vector>

#include "miml/types.hpp"

namespace miml {

double euclidean_distance(const FeatureVector& a, const FeatureVector& b);

// min over instances b in B of ||x - b||.
double min_point_set_distance(const FeatureVector& x, const Bag& b);

// (sum_a min_b d(a,b) + sum_b min_a d(a,b)) / (|A| + |B|)
double avg_hausdorff(const Bag& a, const Bag& b);

// max(max_a min_b d(a,b), max_b min_a d(a,b))
double max_hausdorff(const Bag& a, const Bag& b);

// The bag distance every distance-based learner is parameterized on.
// Average Hausdorff is the default.
enum class BagDistance { kAvgHausdorff, kMaxHausdorff };

double bag_distance(const Bag& a, const Bag& b, BagDistance kind);

const char* to_string(BagDistance kind);
BagDistance bag_distance_from_string(const std::string& name);

// Symmetric n x n matrix of bag distances; the upper triangle is mirrored
// so symmetry holds exactly.
Eigen::MatrixXd pairwise_bag_distances(const std::vector<Bag>& bags, BagDistance kind);

// Cross-distances, rows over `a`, columns over `b`.
Eigen::MatrixXd cross_bag_distances(const std::vector<Bag>& a, const std::vector<Bag>& b,
                                    BagDistance kind);

}  // namespace miml
