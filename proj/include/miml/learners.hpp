#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "miml/distance.hpp"
#include "miml/kernel.hpp"
#include "miml/model.hpp"
#include "miml/ridge.hpp"
#include "miml/svm.hpp"
#include "miml/types.hpp"

namespace miml {

// Parameter defaults follow the comparison protocol's reported choices.

struct MimlKnnParams {
  int r = 10;  // nearest neighbors
  int c = 20;  // citers
};

struct MimlRbfParams {
  double alpha = 0.1;  // fraction of positive bags kept as medoids per label
  double mu = 0.6;     // scaling factor for the hidden-unit width
};

struct MimlSvmParams {
  double ratio = 0.2;  // medoid count as a fraction of the training set
  KernelSpec kernel{1.0};
  double cost = 1.0;
};

struct MimlBoostParams {
  int rounds = 25;
  double base_cost = 1.0;
};

struct M3MimlParams {
  double cost = 1.0;
  int max_iters = 2000;
  double step = 1e-2;  // per-case subgradient step
};

struct KisarParams {
  int prototypes_per_label = 10;
  double similarity_gamma = 1.0;
  double correlation_weight = 0.1;
  int max_iters = 2000;
};

// Nearest-neighbor learner: bags vote through their neighbors and citers;
// an L x L linear map turns citation counts into label scores.
class KnnModel : public Model {
 public:
  KnnModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
           nlohmann::json params, std::vector<Bag> bags, Eigen::MatrixXd labels,
           Eigen::MatrixXd weight, Eigen::VectorXd cite_threshold, MimlKnnParams p,
           BagDistance dist);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<KnnModel> from_payload(std::vector<std::string> label_names,
                                                int input_dim, std::uint64_t seed,
                                                nlohmann::json params,
                                                const nlohmann::json& payload);

  // Summed label-indicator vectors of the bag's neighbors and citers.
  Eigen::VectorXd citation_vector(const Bag& bag) const;
  const Eigen::MatrixXd& weight() const { return weight_; }

 private:
  std::vector<Bag> bags_;
  Eigen::MatrixXd labels_;          // n x L indicators
  Eigen::MatrixXd weight_;          // L x L
  Eigen::VectorXd cite_threshold_;  // per training bag: c-th smallest distance
  MimlKnnParams p_;
  BagDistance dist_;
};

// Two-layer RBF network over bags: per-label medoids form the hidden layer,
// ridge regression fits the output weights.
class RbfModel : public Model {
 public:
  RbfModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
           nlohmann::json params, std::vector<Bag> medoids, double sigma, LinearMap out,
           std::vector<int> flagged, BagDistance dist);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<RbfModel> from_payload(std::vector<std::string> label_names,
                                                int input_dim, std::uint64_t seed,
                                                nlohmann::json params,
                                                const nlohmann::json& payload);

  int num_hidden_units() const { return static_cast<int>(medoids_.size()); }
  double sigma() const { return sigma_; }
  const std::vector<int>& flagged_labels() const { return flagged_; }

 private:
  Eigen::VectorXd activations(const Bag& bag) const;

  std::vector<Bag> medoids_;
  double sigma_;
  LinearMap out_;  // L x M weights plus bias
  std::vector<int> flagged_;  // labels with no positive case: constant -1
  BagDistance dist_;
};

// Constructive-clustering learner: bags embed as distances to medoid bags,
// then one binary RBF SVM per label.
class MimlSvmModel : public Model {
 public:
  MimlSvmModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
               nlohmann::json params, std::vector<Bag> medoids, std::vector<SvmModel> svms,
               BagDistance dist);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<MimlSvmModel> from_payload(std::vector<std::string> label_names,
                                                    int input_dim, std::uint64_t seed,
                                                    nlohmann::json params,
                                                    const nlohmann::json& payload);

  int embedding_dim() const { return static_cast<int>(medoids_.size()); }
  Eigen::VectorXd embed(const Bag& bag) const;
  const std::vector<SvmModel>& svms() const { return svms_; }

 private:
  std::vector<Bag> medoids_;
  std::vector<SvmModel> svms_;  // one per label
  BagDistance dist_;
};

// One boosting round: an instance-level SVM over label-tagged instances,
// stored in base feature space with the tag kept separately.
struct BoostRound {
  double coef = 0.0;
  Eigen::MatrixXd sv;          // support vectors, base features
  std::vector<int> sv_tags;    // label tag of each support vector
  Eigen::VectorXd dual_coefs;  // alpha_i * g_i
  double bias = 0.0;
};

class BoostModel : public Model {
 public:
  BoostModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
             nlohmann::json params, std::vector<BoostRound> rounds, double gamma,
             bool degenerate);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<BoostModel> from_payload(std::vector<std::string> label_names,
                                                  int input_dim, std::uint64_t seed,
                                                  nlohmann::json params,
                                                  const nlohmann::json& payload);

  int num_rounds() const { return static_cast<int>(rounds_.size()); }
  const std::vector<BoostRound>& rounds() const { return rounds_; }
  bool degenerate() const { return degenerate_; }

 private:
  std::vector<BoostRound> rounds_;
  double gamma_ = 1.0;
  bool degenerate_ = false;
};

// Per-label linear models scored by the best instance of the bag.
class M3MimlModel : public Model {
 public:
  M3MimlModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
              nlohmann::json params, Eigen::MatrixXd weight, Eigen::VectorXd bias,
              std::vector<int> flagged_negative, std::vector<int> flagged_positive);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<M3MimlModel> from_payload(std::vector<std::string> label_names,
                                                   int input_dim, std::uint64_t seed,
                                                   nlohmann::json params,
                                                   const nlohmann::json& payload);

  const Eigen::MatrixXd& weight() const { return weight_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  const std::vector<double>& objective_trace() const { return objective_trace_; }
  void set_objective_trace(std::vector<double> trace) { objective_trace_ = std::move(trace); }

 private:
  Eigen::MatrixXd weight_;  // L x d
  Eigen::VectorXd bias_;    // L
  std::vector<int> flagged_negative_;  // no positive case: constant -1
  std::vector<int> flagged_positive_;  // no negative case: constant +1
  std::vector<double> objective_trace_;  // training diagnostic, not serialized
};

// Prototype-similarity learner with a label-correlation regularizer.
class KisarModel : public Model {
 public:
  KisarModel(std::vector<std::string> label_names, int input_dim, std::uint64_t seed,
             nlohmann::json params, Eigen::MatrixXd prototypes, double similarity_gamma,
             Eigen::MatrixXd weight, Eigen::VectorXd bias, std::vector<int> flagged_negative,
             std::vector<int> flagged_positive);

  Eigen::VectorXd score(const Bag& bag) const override;
  nlohmann::json payload() const override;
  static std::unique_ptr<KisarModel> from_payload(std::vector<std::string> label_names,
                                                  int input_dim, std::uint64_t seed,
                                                  nlohmann::json params,
                                                  const nlohmann::json& payload);

  // f_j(X) = max over instances x of exp(-gamma * ||x - prototype_j||^2)
  Eigen::VectorXd embed(const Bag& bag) const;
  int num_prototypes() const { return static_cast<int>(prototypes_.rows()); }
  const std::vector<double>& objective_trace() const { return objective_trace_; }
  void set_objective_trace(std::vector<double> trace) { objective_trace_ = std::move(trace); }

 private:
  Eigen::MatrixXd prototypes_;  // P x d
  double similarity_gamma_;
  Eigen::MatrixXd weight_;  // L x P
  Eigen::VectorXd bias_;
  std::vector<int> flagged_negative_;
  std::vector<int> flagged_positive_;
  std::vector<double> objective_trace_;
};

std::unique_ptr<KnnModel> train_miml_knn(const MIMLDataset& d, const MimlKnnParams& p,
                                         BagDistance dist, std::uint64_t seed);
std::unique_ptr<RbfModel> train_miml_rbf(const MIMLDataset& d, const MimlRbfParams& p,
                                         BagDistance dist, std::uint64_t seed);
std::unique_ptr<MimlSvmModel> train_miml_svm(const MIMLDataset& d, const MimlSvmParams& p,
                                             BagDistance dist, std::uint64_t seed);
std::unique_ptr<BoostModel> train_miml_boost(const MIMLDataset& d, const MimlBoostParams& p,
                                             std::uint64_t seed);
std::unique_ptr<M3MimlModel> train_m3miml(const MIMLDataset& d, const M3MimlParams& p,
                                          std::uint64_t seed);
std::unique_ptr<KisarModel> train_kisar(const MIMLDataset& d, const KisarParams& p,
                                        std::uint64_t seed);

// One multi-instance single-label pair of the boosting expansion.
struct MislBag {
  int case_index = 0;
  int label = 0;
  double sign = 0.0;  // +1 if the label is proper for the case
};

// Every case crossed with every label; instances carry a one-hot label tag
// only implicitly (see BoostRound::sv_tags).
std::vector<MislBag> expand_to_misl(const MIMLDataset& d);

// Cosine similarity of label indicator columns over the training cases.
Eigen::MatrixXd label_correlation(const MIMLDataset& d);

}  // namespace miml
