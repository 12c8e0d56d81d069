#include <cmath>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/cluster.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace {

nlohmann::json svm_params_json(const MimlSvmParams& p, BagDistance dist) {
  nlohmann::json j;
  j["ratio"] = p.ratio;
  j["gamma"] = p.kernel.gamma;
  j["cost"] = p.cost;
  j["distance"] = to_string(dist);
  return j;
}

nlohmann::json svm_to_json(const SvmModel& m) {
  nlohmann::json j;
  j["support_vectors"] = matrix_to_json(m.support_vectors);
  j["dual_coefs"] = vector_to_json(m.dual_coefs);
  j["alphas"] = vector_to_json(m.alphas);
  j["sv_indices"] = m.sv_indices;
  j["bias"] = m.bias;
  j["gamma"] = m.kernel.gamma;
  j["cost"] = m.cost;
  j["degenerate"] = m.degenerate;
  return j;
}

SvmModel svm_from_json(const nlohmann::json& j) {
  SvmModel m;
  m.support_vectors = matrix_from_json(j.at("support_vectors"));
  m.dual_coefs = vector_from_json(j.at("dual_coefs"));
  m.alphas = vector_from_json(j.at("alphas"));
  m.sv_indices = j.at("sv_indices").get<std::vector<int>>();
  m.bias = j.at("bias").get<double>();
  m.kernel.gamma = j.at("gamma").get<double>();
  m.cost = j.at("cost").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

}  // namespace

MimlSvmModel::MimlSvmModel(std::vector<std::string> label_names, int input_dim,
                           std::uint64_t seed, nlohmann::json params,
                           std::vector<Bag> medoids, std::vector<SvmModel> svms,
                           BagDistance dist)
    : Model("mimlsvm", std::move(label_names), input_dim, seed, std::move(params)),
      medoids_(std::move(medoids)),
      svms_(std::move(svms)),
      dist_(dist) {}

Eigen::VectorXd MimlSvmModel::embed(const Bag& bag) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(medoids_.size()));
  for (std::size_t j = 0; j < medoids_.size(); ++j)
    z(static_cast<Eigen::Index>(j)) = bag_distance(bag, medoids_[j], dist_);
  return z;
}

Eigen::VectorXd MimlSvmModel::score(const Bag& bag) const {
  const Eigen::VectorXd z = embed(bag);
  Eigen::VectorXd s(static_cast<Eigen::Index>(svms_.size()));
  for (std::size_t l = 0; l < svms_.size(); ++l)
    s(static_cast<Eigen::Index>(l)) = svm_margin(svms_[l], z);
  return s;
}

nlohmann::json MimlSvmModel::payload() const {
  nlohmann::json j;
  j["medoids"] = bags_to_json(medoids_);
  nlohmann::json svms = nlohmann::json::array();
  for (const SvmModel& m : svms_) svms.push_back(svm_to_json(m));
  j["svms"] = std::move(svms);
  return j;
}

std::unique_ptr<MimlSvmModel> MimlSvmModel::from_payload(std::vector<std::string> label_names,
                                                         int input_dim, std::uint64_t seed,
                                                         nlohmann::json params,
                                                         const nlohmann::json& payload) {
  const BagDistance dist = bag_distance_from_string(params.at("distance").get<std::string>());
  std::vector<SvmModel> svms;
  for (const auto& item : payload.at("svms")) svms.push_back(svm_from_json(item));
  return std::make_unique<MimlSvmModel>(std::move(label_names), input_dim, seed,
                                        std::move(params),
                                        bags_from_json(payload.at("medoids")),
                                        std::move(svms), dist);
}

std::unique_ptr<MimlSvmModel> train_miml_svm(const MIMLDataset& d, const MimlSvmParams& p,
                                             BagDistance dist, std::uint64_t seed) {
  detail::require_trainable(d, "train_miml_svm", 2);
  if (p.ratio <= 0.0 || p.ratio > 1.0)
    throw std::invalid_argument("train_miml_svm: ratio must be in (0, 1]");
  if (p.cost <= 0.0) throw std::invalid_argument("train_miml_svm: cost must be positive");

  const int n = d.num_cases();
  const int L = d.num_labels();
  const std::vector<Bag> bags = detail::dataset_bags(d);
  const Eigen::MatrixXd pairwise = pairwise_bag_distances(bags, dist);

  // Constructive clustering: k medoid bags, then each bag becomes its
  // vector of distances to them.
  const int k = std::max(1, static_cast<int>(std::lround(p.ratio * static_cast<double>(n))));
  const auto dist_fn = [&pairwise](int a, int b) { return pairwise(a, b); };
  const KMedoidsResult km = k_medoids(n, dist_fn, std::min(k, n), detail::derive_seed(seed, 0));

  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(km.medoids.size()));
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < km.medoids.size(); ++j)
      z(i, static_cast<Eigen::Index>(j)) = pairwise(i, km.medoids[j]);

  const Eigen::MatrixXd targets = detail::sign_targets(d.label_matrix());
  std::vector<SvmModel> svms;
  svms.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l)
    svms.push_back(train_binary_svm(z, targets.col(l), p.kernel, p.cost, 1e-3,
                                    detail::derive_seed(seed, static_cast<std::uint64_t>(l) + 1)));

  std::vector<Bag> medoids;
  medoids.reserve(km.medoids.size());
  for (int idx : km.medoids) medoids.push_back(bags[static_cast<std::size_t>(idx)]);

  return std::make_unique<MimlSvmModel>(d.manifest.label_names, d.dim(), seed,
                                        svm_params_json(p, dist), std::move(medoids),
                                        std::move(svms), dist);
}

}  // namespace miml
