#include <cmath>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/cluster.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace {

nlohmann::json rbf_params_json(const MimlRbfParams& p, BagDistance dist) {
  nlohmann::json j;
  j["alpha"] = p.alpha;
  j["mu"] = p.mu;
  j["distance"] = to_string(dist);
  return j;
}

}  // namespace

RbfModel::RbfModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
                   nlohmann::json params, std::vector<Bag> medoids, double sigma,
                   LinearMap out, std::vector<int> flagged, BagDistance dist)
    : Model("mimlrbf", std::move(label_names), input_dim, seed, std::move(params)),
      medoids_(std::move(medoids)),
      sigma_(sigma),
      out_(std::move(out)),
      flagged_(std::move(flagged)),
      dist_(dist) {}

Eigen::VectorXd RbfModel::activations(const Bag& bag) const {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(medoids_.size()));
  const double denom = 2.0 * sigma_ * sigma_;
  for (std::size_t j = 0; j < medoids_.size(); ++j) {
    const double dist = bag_distance(bag, medoids_[j], dist_);
    phi(static_cast<Eigen::Index>(j)) = std::exp(-dist * dist / denom);
  }
  return phi;
}

Eigen::VectorXd RbfModel::score(const Bag& bag) const {
  Eigen::VectorXd s = out_.apply(activations(bag));
  for (int l : flagged_) s(l) = -1.0;
  return s;
}

nlohmann::json RbfModel::payload() const {
  nlohmann::json j;
  j["medoids"] = bags_to_json(medoids_);
  j["sigma"] = sigma_;
  j["weight"] = matrix_to_json(out_.weight);
  j["bias"] = vector_to_json(out_.bias);
  j["flagged"] = flagged_;
  return j;
}

std::unique_ptr<RbfModel> RbfModel::from_payload(std::vector<std::string> label_names,
                                                 int input_dim, std::uint64_t seed,
                                                 nlohmann::json params,
                                                 const nlohmann::json& payload) {
  const BagDistance dist = bag_distance_from_string(params.at("distance").get<std::string>());
  LinearMap out;
  out.weight = matrix_from_json(payload.at("weight"));
  out.bias = vector_from_json(payload.at("bias"));
  return std::make_unique<RbfModel>(std::move(label_names), input_dim, seed,
                                    std::move(params), bags_from_json(payload.at("medoids")),
                                    payload.at("sigma").get<double>(), std::move(out),
                                    payload.at("flagged").get<std::vector<int>>(), dist);
}

std::unique_ptr<RbfModel> train_miml_rbf(const MIMLDataset& d, const MimlRbfParams& p,
                                         BagDistance dist, std::uint64_t seed) {
  detail::require_trainable(d, "train_miml_rbf", 1);
  if (p.alpha <= 0.0 || p.alpha > 1.0)
    throw std::invalid_argument("train_miml_rbf: alpha must be in (0, 1]");
  if (p.mu <= 0.0) throw std::invalid_argument("train_miml_rbf: mu must be positive");

  const int n = d.num_cases();
  const int L = d.num_labels();
  const std::vector<Bag> bags = detail::dataset_bags(d);
  const Eigen::MatrixXd labels = d.label_matrix();
  const Eigen::MatrixXd pairwise = pairwise_bag_distances(bags, dist);

  // First layer: per-label medoids over that label's positive bags.
  std::vector<int> medoid_bag_indices;
  std::vector<int> flagged;
  for (int l = 0; l < L; ++l) {
    std::vector<int> positives;
    for (int i = 0; i < n; ++i)
      if (labels(i, l) > 0.5) positives.push_back(i);
    if (positives.empty()) {
      flagged.push_back(l);  // constant -1 score for this label
      continue;
    }
    const int k = std::max(
        1, static_cast<int>(std::lround(p.alpha * static_cast<double>(positives.size()))));
    const auto dist_fn = [&pairwise, &positives](int a, int b) {
      return pairwise(positives[static_cast<std::size_t>(a)],
                      positives[static_cast<std::size_t>(b)]);
    };
    const KMedoidsResult km = k_medoids(static_cast<int>(positives.size()), dist_fn,
                                        std::min<int>(k, static_cast<int>(positives.size())),
                                        detail::derive_seed(seed, static_cast<std::uint64_t>(l)));
    for (int m : km.medoids) medoid_bag_indices.push_back(positives[static_cast<std::size_t>(m)]);
  }
  const int hidden = static_cast<int>(medoid_bag_indices.size());
  if (hidden == 0) throw std::invalid_argument("train_miml_rbf: no label has a positive case");

  // Unit width from the mean pairwise medoid distance, scaled by mu.
  double mean_dist = 0.0;
  int pairs = 0;
  for (int a = 0; a < hidden; ++a)
    for (int b = a + 1; b < hidden; ++b) {
      mean_dist += pairwise(medoid_bag_indices[static_cast<std::size_t>(a)],
                            medoid_bag_indices[static_cast<std::size_t>(b)]);
      ++pairs;
    }
  mean_dist = pairs > 0 ? mean_dist / pairs : 1.0;
  double sigma = p.mu * mean_dist;
  if (!(sigma > 0.0)) sigma = 1e-12;

  Eigen::MatrixXd phi(n, hidden);
  const double denom = 2.0 * sigma * sigma;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < hidden; ++j) {
      const double dij = pairwise(i, medoid_bag_indices[static_cast<std::size_t>(j)]);
      phi(i, j) = std::exp(-dij * dij / denom);
    }

  LinearMap out = ridge_solve_affine(phi, detail::sign_targets(labels), kRidgeDefaultLambda);
  for (int l : flagged) {
    out.weight.row(l).setZero();
    out.bias(l) = -1.0;
  }

  std::vector<Bag> medoids;
  medoids.reserve(static_cast<std::size_t>(hidden));
  for (int idx : medoid_bag_indices) medoids.push_back(bags[static_cast<std::size_t>(idx)]);

  return std::make_unique<RbfModel>(d.manifest.label_names, d.dim(), seed,
                                    rbf_params_json(p, dist), std::move(medoids), sigma,
                                    std::move(out), std::move(flagged), dist);
}

}  // namespace miml
