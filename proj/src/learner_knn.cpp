#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace detail {

void require_trainable(const MIMLDataset& d, const char* who, int min_cases) {
  if (d.num_cases() < min_cases)
    throw std::invalid_argument(std::string(who) + ": needs at least " +
                                std::to_string(min_cases) + " cases, got " +
                                std::to_string(d.num_cases()));
  const auto violations = validate_dataset(d);
  if (!violations.empty())
    throw std::invalid_argument(std::string(who) + ": invalid dataset (case '" +
                                violations.front().case_id + "': " +
                                violations.front().rule + ")");
}

std::vector<Bag> dataset_bags(const MIMLDataset& d) {
  std::vector<Bag> bags;
  bags.reserve(d.cases.size());
  for (const Case& c : d.cases) bags.push_back(c.bag);
  return bags;
}

}  // namespace detail

namespace {

// Indices of the r smallest entries, ties broken toward the lower index.
// `skip` excludes one position (the query itself during training).
std::vector<int> smallest_indices(const Eigen::VectorXd& dist, int r, int skip) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(dist.size()));
  for (int i = 0; i < dist.size(); ++i)
    if (i != skip) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&dist](int a, int b) { return dist(a) < dist(b); });
  order.resize(static_cast<std::size_t>(std::min<std::size_t>(order.size(), static_cast<std::size_t>(r))));
  return order;
}

nlohmann::json knn_params_json(const MimlKnnParams& p, BagDistance dist) {
  nlohmann::json j;
  j["r"] = p.r;
  j["c"] = p.c;
  j["distance"] = to_string(dist);
  return j;
}

}  // namespace

KnnModel::KnnModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
                   nlohmann::json params, std::vector<Bag> bags, Eigen::MatrixXd labels,
                   Eigen::MatrixXd weight, Eigen::VectorXd cite_threshold, MimlKnnParams p,
                   BagDistance dist)
    : Model("mimlknn", std::move(label_names), input_dim, seed, std::move(params)),
      bags_(std::move(bags)),
      labels_(std::move(labels)),
      weight_(std::move(weight)),
      cite_threshold_(std::move(cite_threshold)),
      p_(p),
      dist_(dist) {}

Eigen::VectorXd KnnModel::citation_vector(const Bag& bag) const {
  const int n = static_cast<int>(bags_.size());
  Eigen::VectorXd dist(n);
  for (int j = 0; j < n; ++j) dist(j) = bag_distance(bag, bags_[static_cast<std::size_t>(j)], dist_);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(labels_.cols());
  for (int j : smallest_indices(dist, p_.r, -1)) v += labels_.row(j).transpose();
  for (int j = 0; j < n; ++j)
    if (dist(j) <= cite_threshold_(j)) v += labels_.row(j).transpose();
  return v;
}

Eigen::VectorXd KnnModel::score(const Bag& bag) const {
  return weight_ * citation_vector(bag);
}

nlohmann::json KnnModel::payload() const {
  nlohmann::json j;
  j["bags"] = bags_to_json(bags_);
  j["labels"] = matrix_to_json(labels_);
  j["weight"] = matrix_to_json(weight_);
  j["cite_threshold"] = vector_to_json(cite_threshold_);
  return j;
}

std::unique_ptr<KnnModel> KnnModel::from_payload(std::vector<std::string> label_names,
                                                 int input_dim, std::uint64_t seed,
                                                 nlohmann::json params,
                                                 const nlohmann::json& payload) {
  MimlKnnParams p;
  p.r = params.at("r").get<int>();
  p.c = params.at("c").get<int>();
  const BagDistance dist = bag_distance_from_string(params.at("distance").get<std::string>());
  return std::make_unique<KnnModel>(
      std::move(label_names), input_dim, seed, std::move(params),
      bags_from_json(payload.at("bags")), matrix_from_json(payload.at("labels")),
      matrix_from_json(payload.at("weight")), vector_from_json(payload.at("cite_threshold")),
      p, dist);
}

std::unique_ptr<KnnModel> train_miml_knn(const MIMLDataset& d, const MimlKnnParams& p,
                                         BagDistance dist, std::uint64_t seed) {
  detail::require_trainable(d, "train_miml_knn", 2);
  if (p.r < 1 || p.c < 1)
    throw std::invalid_argument("train_miml_knn: r and c must be positive");
  const int n = d.num_cases();
  if (p.r >= n)
    throw std::invalid_argument("train_miml_knn: r=" + std::to_string(p.r) +
                                " requires more than r cases, got " + std::to_string(n));

  const std::vector<Bag> bags = detail::dataset_bags(d);
  const Eigen::MatrixXd labels = d.label_matrix();
  const Eigen::MatrixXd pairwise = pairwise_bag_distances(bags, dist);

  // c-th smallest distance from each bag to the others; a bag cites any
  // query at or below its threshold.
  Eigen::VectorXd cite_threshold(n);
  for (int j = 0; j < n; ++j) {
    if (p.c >= n) {
      cite_threshold(j) = std::numeric_limits<double>::infinity();
      continue;
    }
    std::vector<double> others;
    others.reserve(static_cast<std::size_t>(n - 1));
    for (int k = 0; k < n; ++k)
      if (k != j) others.push_back(pairwise(j, k));
    std::nth_element(others.begin(), others.begin() + (p.c - 1), others.end());
    cite_threshold(j) = others[static_cast<std::size_t>(p.c - 1)];
  }

  // Citation vector of each training case: label indicators summed over its
  // r nearest neighbors and over the bags that cite it.
  const int L = d.num_labels();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, L);
  for (int i = 0; i < n; ++i) {
    for (int j : smallest_indices(pairwise.col(i), p.r, i)) phi.row(i) += labels.row(j);
    for (int j = 0; j < n; ++j)
      if (j != i && pairwise(j, i) <= cite_threshold(j)) phi.row(i) += labels.row(j);
  }

  const LinearMap map = ridge_solve(phi, detail::sign_targets(labels), kRidgeDefaultLambda);

  return std::make_unique<KnnModel>(d.manifest.label_names, d.dim(), seed,
                                    knn_params_json(p, dist), bags, labels, map.weight,
                                    cite_threshold, p, dist);
}

}  // namespace miml
