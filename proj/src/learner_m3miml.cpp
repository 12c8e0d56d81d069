#include <cmath>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace {

nlohmann::json m3_params_json(const M3MimlParams& p) {
  nlohmann::json j;
  j["cost"] = p.cost;
  j["max_iters"] = p.max_iters;
  j["step"] = p.step;
  return j;
}

// max over instances of w . x, and which instance attains it.
double bag_max(const Eigen::MatrixXd& instances, const Eigen::VectorXd& w, int* argmax) {
  const Eigen::VectorXd vals = instances * w;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i)
    if (vals(i) > vals(best)) best = i;
  if (argmax) *argmax = static_cast<int>(best);
  return vals(best);
}

}  // namespace

M3MimlModel::M3MimlModel(std::vector<std::string> label_names, int input_dim,
                         std::uint64_t seed, nlohmann::json params, Eigen::MatrixXd weight,
                         Eigen::VectorXd bias, std::vector<int> flagged_negative,
                         std::vector<int> flagged_positive)
    : Model("m3miml", std::move(label_names), input_dim, seed, std::move(params)),
      weight_(std::move(weight)),
      bias_(std::move(bias)),
      flagged_negative_(std::move(flagged_negative)),
      flagged_positive_(std::move(flagged_positive)) {}

Eigen::VectorXd M3MimlModel::score(const Bag& bag) const {
  // score_l = max over instances of w_l . x, plus b_l
  Eigen::VectorXd s =
      (bag.instances() * weight_.transpose()).colwise().maxCoeff().transpose() + bias_;
  for (int l : flagged_negative_) s(l) = -1.0;
  for (int l : flagged_positive_) s(l) = 1.0;
  return s;
}

nlohmann::json M3MimlModel::payload() const {
  nlohmann::json j;
  j["weight"] = matrix_to_json(weight_);
  j["bias"] = vector_to_json(bias_);
  j["flagged_negative"] = flagged_negative_;
  j["flagged_positive"] = flagged_positive_;
  return j;
}

std::unique_ptr<M3MimlModel> M3MimlModel::from_payload(std::vector<std::string> label_names,
                                                       int input_dim, std::uint64_t seed,
                                                       nlohmann::json params,
                                                       const nlohmann::json& payload) {
  return std::make_unique<M3MimlModel>(
      std::move(label_names), input_dim, seed, std::move(params),
      matrix_from_json(payload.at("weight")), vector_from_json(payload.at("bias")),
      payload.at("flagged_negative").get<std::vector<int>>(),
      payload.at("flagged_positive").get<std::vector<int>>());
}

std::unique_ptr<M3MimlModel> train_m3miml(const MIMLDataset& d, const M3MimlParams& p,
                                          std::uint64_t seed) {
  detail::require_trainable(d, "train_m3miml", 1);
  if (p.cost <= 0.0 || p.step <= 0.0 || p.max_iters < 0)
    throw std::invalid_argument("train_m3miml: cost and step must be positive");

  const int n = d.num_cases();
  const int L = d.num_labels();
  const int dim = d.dim();
  const Eigen::MatrixXd y01 = d.label_matrix();
  const Eigen::MatrixXd sign = detail::sign_targets(y01);

  std::vector<int> flagged_negative, flagged_positive;
  std::vector<bool> trained(static_cast<std::size_t>(L), true);
  for (int l = 0; l < L; ++l) {
    const double positives = y01.col(l).sum();
    if (positives == 0.0) {
      flagged_negative.push_back(l);
      trained[static_cast<std::size_t>(l)] = false;
    } else if (positives == static_cast<double>(n)) {
      flagged_positive.push_back(l);
      trained[static_cast<std::size_t>(l)] = false;
    }
  }

  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(L, dim);
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(L);

  const auto objective = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    double obj = 0.0;
    for (int l = 0; l < L; ++l) {
      if (!trained[static_cast<std::size_t>(l)]) continue;
      obj += 0.5 * w.row(l).squaredNorm();
      for (int i = 0; i < n; ++i) {
        const double s =
            bag_max(d.cases[static_cast<std::size_t>(i)].bag.instances(),
                    w.row(l).transpose(), nullptr) +
            b(l);
        obj += p.cost * std::max(0.0, 1.0 - sign(i, l) * s);
      }
    }
    return obj;
  };

  // Fixed-step subgradient descent on the hinge objective; the step is
  // per-case so the same default works across dataset sizes. The best
  // iterate seen is what the model keeps.
  std::vector<double> trace;
  double best_obj = objective(weight, bias);
  trace.push_back(best_obj);
  Eigen::MatrixXd best_weight = weight;
  Eigen::VectorXd best_bias = bias;

  const double step = p.step / (p.cost * std::max(1, n));
  for (int iter = 0; iter < p.max_iters; ++iter) {
    Eigen::MatrixXd grad_w = Eigen::MatrixXd::Zero(L, dim);
    Eigen::VectorXd grad_b = Eigen::VectorXd::Zero(L);
    for (int l = 0; l < L; ++l) {
      if (!trained[static_cast<std::size_t>(l)]) continue;
      grad_w.row(l) = weight.row(l);
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        const double s = bag_max(d.cases[static_cast<std::size_t>(i)].bag.instances(),
                                 weight.row(l).transpose(), &arg) +
                         bias(l);
        if (1.0 - sign(i, l) * s > 0.0) {
          grad_w.row(l) -=
              p.cost * sign(i, l) *
              d.cases[static_cast<std::size_t>(i)].bag.instances().row(arg);
          grad_b(l) -= p.cost * sign(i, l);
        }
      }
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

  auto model = std::make_unique<M3MimlModel>(d.manifest.label_names, dim, seed,
                                             m3_params_json(p), std::move(best_weight),
                                             std::move(best_bias), std::move(flagged_negative),
                                             std::move(flagged_positive));
  model->set_objective_trace(std::move(trace));
  return model;
}

}  // namespace miml
