#include "miml/distance.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace miml {

namespace {

void check_dims(int a, int b, const char* where) {
  if (a != b)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

void check_non_empty(const Bag& b, const char* where) {
  if (b.empty()) throw std::invalid_argument(std::string(where) + ": empty bag");
}

// D(i,j) = ||a_i - b_j||. Each difference is materialized into a contiguous
// vector first so the reduction takes the exact same code path as
// euclidean_distance; singleton bags then reduce to it bit-for-bit.
Eigen::MatrixXd instance_cross_distances(const Bag& a, const Bag& b) {
  Eigen::MatrixXd d(a.size(), b.size());
  Eigen::VectorXd diff(a.dim());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      diff = (a.instances().row(i) - b.instances().row(j)).transpose();
      d(i, j) = diff.norm();
    }
  return d;
}

}  // namespace

double euclidean_distance(const FeatureVector& a, const FeatureVector& b) {
  check_dims(static_cast<int>(a.size()), static_cast<int>(b.size()), "euclidean_distance");
  return (a - b).norm();
}

double min_point_set_distance(const FeatureVector& x, const Bag& b) {
  check_non_empty(b, "min_point_set_distance");
  check_dims(static_cast<int>(x.size()), b.dim(), "min_point_set_distance");
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd diff(b.dim());
  for (int i = 0; i < b.size(); ++i) {
    diff = (b.instances().row(i) - x.transpose()).transpose();
    best = std::min(best, diff.norm());
  }
  return best;
}

double avg_hausdorff(const Bag& a, const Bag& b) {
  check_non_empty(a, "avg_hausdorff");
  check_non_empty(b, "avg_hausdorff");
  check_dims(a.dim(), b.dim(), "avg_hausdorff");
  const Eigen::MatrixXd d = instance_cross_distances(a, b);
  const double total = d.rowwise().minCoeff().sum() + d.colwise().minCoeff().sum();
  return total / static_cast<double>(a.size() + b.size());
}

double max_hausdorff(const Bag& a, const Bag& b) {
  check_non_empty(a, "max_hausdorff");
  check_non_empty(b, "max_hausdorff");
  check_dims(a.dim(), b.dim(), "max_hausdorff");
  const Eigen::MatrixXd d = instance_cross_distances(a, b);
  return std::max(d.rowwise().minCoeff().maxCoeff(), d.colwise().minCoeff().maxCoeff());
}

double bag_distance(const Bag& a, const Bag& b, BagDistance kind) {
  return kind == BagDistance::kAvgHausdorff ? avg_hausdorff(a, b) : max_hausdorff(a, b);
}

const char* to_string(BagDistance kind) {
  return kind == BagDistance::kAvgHausdorff ? "avg" : "max";
}

BagDistance bag_distance_from_string(const std::string& name) {
  if (name == "avg") return BagDistance::kAvgHausdorff;
  if (name == "max") return BagDistance::kMaxHausdorff;
  throw std::invalid_argument("unknown bag distance '" + name + "' (expected avg or max)");
}

Eigen::MatrixXd pairwise_bag_distances(const std::vector<Bag>& bags, BagDistance kind) {
  const int n = static_cast<int>(bags.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = bag_distance(bags[static_cast<std::size_t>(i)],
                                    bags[static_cast<std::size_t>(j)], kind);
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

Eigen::MatrixXd cross_bag_distances(const std::vector<Bag>& a, const std::vector<Bag>& b,
                                    BagDistance kind) {
  Eigen::MatrixXd d(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          bag_distance(a[i], b[j], kind);
  return d;
}

}  // namespace miml
