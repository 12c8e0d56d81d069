#include <cmath>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/cluster.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace {

nlohmann::json kisar_params_json(const KisarParams& p) {
  nlohmann::json j;
  j["prototypes_per_label"] = p.prototypes_per_label;
  j["similarity_gamma"] = p.similarity_gamma;
  j["correlation_weight"] = p.correlation_weight;
  j["max_iters"] = p.max_iters;
  return j;
}

Eigen::VectorXd embed_bag(const Bag& bag, const Eigen::MatrixXd& prototypes, double gamma) {
  // f_j = max over instances of exp(-gamma * ||x - p_j||^2)
  const Eigen::VectorXd xsq = bag.instances().rowwise().squaredNorm();
  const Eigen::VectorXd psq = prototypes.rowwise().squaredNorm();
  Eigen::MatrixXd cross = bag.instances() * prototypes.transpose();
  for (Eigen::Index i = 0; i < cross.rows(); ++i)
    for (Eigen::Index j = 0; j < cross.cols(); ++j)
      cross(i, j) = std::exp(-gamma * std::max(0.0, xsq(i) + psq(j) - 2.0 * cross(i, j)));
  return cross.colwise().maxCoeff().transpose();
}

}  // namespace

Eigen::MatrixXd label_correlation(const MIMLDataset& d) {
  const Eigen::MatrixXd y = d.label_matrix();
  const int L = d.num_labels();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(L, L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) {
      const double na = y.col(a).norm();
      const double nb = y.col(b).norm();
      corr(a, b) = (na > 0.0 && nb > 0.0) ? y.col(a).dot(y.col(b)) / (na * nb) : 0.0;
    }
  return corr;
}

KisarModel::KisarModel(std::vector<std::string> label_names, int input_dim,
                       std::uint64_t seed, nlohmann::json params, Eigen::MatrixXd prototypes,
                       double similarity_gamma, Eigen::MatrixXd weight, Eigen::VectorXd bias,
                       std::vector<int> flagged_negative, std::vector<int> flagged_positive)
    : Model("kisar", std::move(label_names), input_dim, seed, std::move(params)),
      prototypes_(std::move(prototypes)),
      similarity_gamma_(similarity_gamma),
      weight_(std::move(weight)),
      bias_(std::move(bias)),
      flagged_negative_(std::move(flagged_negative)),
      flagged_positive_(std::move(flagged_positive)) {}

Eigen::VectorXd KisarModel::embed(const Bag& bag) const {
  return embed_bag(bag, prototypes_, similarity_gamma_);
}

Eigen::VectorXd KisarModel::score(const Bag& bag) const {
  Eigen::VectorXd s = weight_ * embed(bag) + bias_;
  for (int l : flagged_negative_) s(l) = -1.0;
  for (int l : flagged_positive_) s(l) = 1.0;
  return s;
}

nlohmann::json KisarModel::payload() const {
  nlohmann::json j;
  j["prototypes"] = matrix_to_json(prototypes_);
  j["similarity_gamma"] = similarity_gamma_;
  j["weight"] = matrix_to_json(weight_);
  j["bias"] = vector_to_json(bias_);
  j["flagged_negative"] = flagged_negative_;
  j["flagged_positive"] = flagged_positive_;
  return j;
}

std::unique_ptr<KisarModel> KisarModel::from_payload(std::vector<std::string> label_names,
                                                     int input_dim, std::uint64_t seed,
                                                     nlohmann::json params,
                                                     const nlohmann::json& payload) {
  return std::make_unique<KisarModel>(
      std::move(label_names), input_dim, seed, std::move(params),
      matrix_from_json(payload.at("prototypes")), payload.at("similarity_gamma").get<double>(),
      matrix_from_json(payload.at("weight")), vector_from_json(payload.at("bias")),
      payload.at("flagged_negative").get<std::vector<int>>(),
      payload.at("flagged_positive").get<std::vector<int>>());
}

std::unique_ptr<KisarModel> train_kisar(const MIMLDataset& d, const KisarParams& p,
                                        std::uint64_t seed) {
  detail::require_trainable(d, "train_kisar", 1);
  if (p.prototypes_per_label < 1)
    throw std::invalid_argument("train_kisar: prototypes_per_label must be positive");
  if (p.similarity_gamma <= 0.0)
    throw std::invalid_argument("train_kisar: similarity_gamma must be positive");
  if (p.correlation_weight < 0.0)
    throw std::invalid_argument("train_kisar: correlation_weight must be nonnegative");

  const int n = d.num_cases();
  const int L = d.num_labels();
  const int dim = d.dim();
  const Eigen::MatrixXd y01 = d.label_matrix();
  const Eigen::MatrixXd sign = detail::sign_targets(y01);

  std::vector<int> flagged_negative, flagged_positive;
  std::vector<int> trained_labels;
  for (int l = 0; l < L; ++l) {
    const double positives = y01.col(l).sum();
    if (positives == 0.0)
      flagged_negative.push_back(l);
    else if (positives == static_cast<double>(n))
      flagged_positive.push_back(l);
    else
      trained_labels.push_back(l);
  }

  // Prototypes: k-means over the instances pooled from each label's
  // positive bags, label by label.
  Eigen::MatrixXd prototypes(0, dim);
  for (int l = 0; l < L; ++l) {
    std::vector<int> positive_cases;
    for (int i = 0; i < n; ++i)
      if (y01(i, l) > 0.5) positive_cases.push_back(i);
    if (positive_cases.empty()) continue;
    int pool_rows = 0;
    for (int i : positive_cases) pool_rows += d.cases[static_cast<std::size_t>(i)].bag.size();
    Eigen::MatrixXd pool(pool_rows, dim);
    int at = 0;
    for (int i : positive_cases) {
      const Bag& bag = d.cases[static_cast<std::size_t>(i)].bag;
      pool.middleRows(at, bag.size()) = bag.instances();
      at += bag.size();
    }
    const int k = std::min(p.prototypes_per_label, pool_rows);
    const KMeansResult km =
        k_means(pool, k, detail::derive_seed(seed, static_cast<std::uint64_t>(l)));
    const Eigen::Index old_rows = prototypes.rows();
    prototypes.conservativeResize(old_rows + k, dim);
    prototypes.bottomRows(k) = km.centroids;
  }
  const int P = static_cast<int>(prototypes.rows());
  if (P == 0) throw std::invalid_argument("train_kisar: no label has a positive case");

  Eigen::MatrixXd f(n, P);
  for (int i = 0; i < n; ++i)
    f.row(i) = embed_bag(d.cases[static_cast<std::size_t>(i)].bag, prototypes,
                         p.similarity_gamma)
                   .transpose();

  const Eigen::MatrixXd corr = label_correlation(d);

  // Joint logistic fit with the label-relation penalty
  //   sum_il log(1 + exp(-t_il (w_l.f_i + b_l)))
  //   + cw * sum_{l<m} Corr(l,m) ||w_l - w_m||^2
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(L, P);
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(L);

  const auto objective = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    double obj = 0.0;
    for (int l : trained_labels) {
      const Eigen::VectorXd z = f * w.row(l).transpose() + Eigen::VectorXd::Constant(n, b(l));
      for (int i = 0; i < n; ++i) {
        const double margin = -sign(i, l) * z(i);
        // log(1+exp(m)) computed stably
        obj += margin > 30.0 ? margin : std::log1p(std::exp(margin));
      }
    }
    for (std::size_t a = 0; a < trained_labels.size(); ++a)
      for (std::size_t b2 = a + 1; b2 < trained_labels.size(); ++b2) {
        const int l = trained_labels[a];
        const int mlab = trained_labels[b2];
        obj += p.correlation_weight * corr(l, mlab) *
               (w.row(l) - w.row(mlab)).squaredNorm();
      }
    return obj;
  };

  // Gradient descent with a Lipschitz-bound step, so the objective cannot
  // increase; the best iterate is kept regardless.
  double corr_row_max = 0.0;
  for (int l = 0; l < L; ++l) {
    double row = 0.0;
    for (int m2 = 0; m2 < L; ++m2)
      if (m2 != l) row += corr(l, m2);
    corr_row_max = std::max(corr_row_max, row);
  }
  const double lipschitz =
      0.25 * (f.squaredNorm() + n) + 4.0 * p.correlation_weight * corr_row_max + 1.0;
  const double step = 1.0 / lipschitz;

  std::vector<double> trace;
  double best_obj = objective(weight, bias);
  trace.push_back(best_obj);
  Eigen::MatrixXd best_weight = weight;
  Eigen::VectorXd best_bias = bias;

  for (int iter = 0; iter < p.max_iters; ++iter) {
    Eigen::MatrixXd grad_w = Eigen::MatrixXd::Zero(L, P);
    Eigen::VectorXd grad_b = Eigen::VectorXd::Zero(L);
    for (int l : trained_labels) {
      const Eigen::VectorXd z = f * weight.row(l).transpose() +
                                Eigen::VectorXd::Constant(n, bias(l));
      for (int i = 0; i < n; ++i) {
        const double t = sign(i, l);
        const double sig = 1.0 / (1.0 + std::exp(t * z(i)));  // d/dz log(1+e^{-tz}) = -t*sig
        grad_w.row(l) += -t * sig * f.row(i);
        grad_b(l) += -t * sig;
      }
    }
    for (std::size_t a = 0; a < trained_labels.size(); ++a)
      for (std::size_t b2 = a + 1; b2 < trained_labels.size(); ++b2) {
        const int l = trained_labels[a];
        const int mlab = trained_labels[b2];
        const Eigen::RowVectorXd diff = weight.row(l) - weight.row(mlab);
        grad_w.row(l) += 2.0 * p.correlation_weight * corr(l, mlab) * diff;
        grad_w.row(mlab) -= 2.0 * p.correlation_weight * corr(l, mlab) * diff;
      }
    weight -= step * grad_w;
    bias -= step * grad_b;

    const double obj = objective(weight, bias);
    if (obj < best_obj) {
      best_obj = obj;
      best_weight = weight;
      best_bias = bias;
    }
    if ((iter + 1) % 50 == 0 || iter + 1 == p.max_iters) trace.push_back(best_obj);
  }

  auto model = std::make_unique<KisarModel>(
      d.manifest.label_names, dim, seed, kisar_params_json(p), std::move(prototypes),
      p.similarity_gamma, std::move(best_weight), std::move(best_bias),
      std::move(flagged_negative), std::move(flagged_positive));
  model->set_objective_trace(std::move(trace));
  return model;
}

}  // namespace miml
