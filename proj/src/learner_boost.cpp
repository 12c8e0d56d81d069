#include <cmath>
#include <stdexcept>

#include "learner_common.hpp"
#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

namespace {

// The base SVM follows the bag-level learner's kernel setup.
constexpr double kBoostGamma = 1.0;
constexpr int kBoostSmoSweeps = 30;
constexpr double kErrorFloor = 1e-8;

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

nlohmann::json boost_params_json(const MimlBoostParams& p) {
  nlohmann::json j;
  j["rounds"] = p.rounds;
  j["base_cost"] = p.base_cost;
  return j;
}

}  // namespace

std::vector<MislBag> expand_to_misl(const MIMLDataset& d) {
  std::vector<MislBag> out;
  const int L = d.num_labels();
  out.reserve(d.cases.size() * static_cast<std::size_t>(L));
  for (int i = 0; i < d.num_cases(); ++i)
    for (int y = 0; y < L; ++y)
      out.push_back(MislBag{i, y,
                            d.cases[static_cast<std::size_t>(i)].labels.contains(y) ? 1.0 : -1.0});
  return out;
}

BoostModel::BoostModel(std::vector<std::string> label_names, int input_dim,
                       std::uint64_t seed, nlohmann::json params,
                       std::vector<BoostRound> rounds, double gamma, bool degenerate)
    : Model("mimlboost", std::move(label_names), input_dim, seed, std::move(params)),
      rounds_(std::move(rounds)),
      gamma_(gamma),
      degenerate_(degenerate) {}

Eigen::VectorXd BoostModel::score(const Bag& bag) const {
  const int L = num_labels();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(L);
  if (rounds_.empty()) return total;  // degenerate: constant zero scorer

  const double tag_mult = std::exp(-2.0 * gamma_);
  const Eigen::VectorXd xsq = bag.instances().rowwise().squaredNorm();
  for (const BoostRound& round : rounds_) {
    Eigen::VectorXd margins_bias = Eigen::VectorXd::Constant(bag.size(), round.bias);
    Eigen::MatrixXd per_tag = Eigen::MatrixXd::Zero(bag.size(), L);
    if (round.sv.rows() > 0) {
      // Kernel against a tagged support vector factorizes into a base-space
      // kernel times a tag match factor, so one cross matrix serves all labels.
      const Eigen::VectorXd ssq = round.sv.rowwise().squaredNorm();
      Eigen::MatrixXd cross = bag.instances() * round.sv.transpose();
      for (Eigen::Index i = 0; i < cross.rows(); ++i)
        for (Eigen::Index j = 0; j < cross.cols(); ++j)
          cross(i, j) = std::exp(-gamma_ * std::max(0.0, xsq(i) + ssq(j) - 2.0 * cross(i, j)));
      Eigen::MatrixXd tagged_dual = Eigen::MatrixXd::Zero(round.sv.rows(), L);
      for (Eigen::Index j = 0; j < round.sv.rows(); ++j)
        tagged_dual(j, round.sv_tags[static_cast<std::size_t>(j)]) = round.dual_coefs(j);
      per_tag = cross * tagged_dual;  // bag.size() x L
      const Eigen::VectorXd all_tags = per_tag.rowwise().sum();
      per_tag = (1.0 - tag_mult) * per_tag;
      per_tag.colwise() += tag_mult * all_tags;
    }
    for (int y = 0; y < L; ++y) {
      double mean_margin = 0.0;
      for (int i = 0; i < bag.size(); ++i) mean_margin += per_tag(i, y) + margins_bias(i);
      total(y) += round.coef * sign_of(mean_margin / bag.size());
    }
  }
  return total;
}

nlohmann::json BoostModel::payload() const {
  nlohmann::json j;
  j["gamma"] = gamma_;
  j["degenerate"] = degenerate_;
  nlohmann::json rounds = nlohmann::json::array();
  for (const BoostRound& r : rounds_) {
    nlohmann::json jr;
    jr["coef"] = r.coef;
    jr["sv"] = matrix_to_json(r.sv);
    jr["sv_tags"] = r.sv_tags;
    jr["dual_coefs"] = vector_to_json(r.dual_coefs);
    jr["bias"] = r.bias;
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

std::unique_ptr<BoostModel> BoostModel::from_payload(std::vector<std::string> label_names,
                                                     int input_dim, std::uint64_t seed,
                                                     nlohmann::json params,
                                                     const nlohmann::json& payload) {
  std::vector<BoostRound> rounds;
  for (const auto& jr : payload.at("rounds")) {
    BoostRound r;
    r.coef = jr.at("coef").get<double>();
    r.sv = matrix_from_json(jr.at("sv"));
    r.sv_tags = jr.at("sv_tags").get<std::vector<int>>();
    r.dual_coefs = vector_from_json(jr.at("dual_coefs"));
    r.bias = jr.at("bias").get<double>();
    rounds.push_back(std::move(r));
  }
  return std::make_unique<BoostModel>(std::move(label_names), input_dim, seed,
                                      std::move(params), std::move(rounds),
                                      payload.at("gamma").get<double>(),
                                      payload.at("degenerate").get<bool>());
}

std::unique_ptr<BoostModel> train_miml_boost(const MIMLDataset& d, const MimlBoostParams& p,
                                             std::uint64_t seed) {
  detail::require_trainable(d, "train_miml_boost", 2);
  if (p.rounds < 1) throw std::invalid_argument("train_miml_boost: rounds must be positive");
  if (p.base_cost <= 0.0)
    throw std::invalid_argument("train_miml_boost: base_cost must be positive");

  const int n_cases = d.num_cases();
  const int L = d.num_labels();
  const int dim = d.dim();

  // Base instance pool shared by every derived bag of a case.
  int m = 0;
  for (const Case& c : d.cases) m += c.bag.size();
  Eigen::MatrixXd xbase(m, dim);
  std::vector<int> case_start(static_cast<std::size_t>(n_cases));
  std::vector<int> case_count(static_cast<std::size_t>(n_cases));
  {
    int at = 0;
    for (int i = 0; i < n_cases; ++i) {
      const Bag& bag = d.cases[static_cast<std::size_t>(i)].bag;
      case_start[static_cast<std::size_t>(i)] = at;
      case_count[static_cast<std::size_t>(i)] = bag.size();
      xbase.middleRows(at, bag.size()) = bag.instances();
      at += bag.size();
    }
  }

  const std::vector<MislBag> derived = expand_to_misl(d);
  const int n_bags = static_cast<int>(derived.size());

  // SMO points: every instance of every derived bag. Tags stay implicit so
  // the kernel can be served from one base-space Gram table.
  const int total_points = m * L;
  std::vector<int> point_base(static_cast<std::size_t>(total_points));
  std::vector<int> point_tag(static_cast<std::size_t>(total_points));
  std::vector<int> point_bag(static_cast<std::size_t>(total_points));
  Eigen::VectorXd point_sign(total_points);
  {
    int at = 0;
    for (int b = 0; b < n_bags; ++b) {
      const MislBag& mb = derived[static_cast<std::size_t>(b)];
      const int start = case_start[static_cast<std::size_t>(mb.case_index)];
      const int count = case_count[static_cast<std::size_t>(mb.case_index)];
      for (int k = 0; k < count; ++k) {
        point_base[static_cast<std::size_t>(at)] = start + k;
        point_tag[static_cast<std::size_t>(at)] = mb.label;
        point_bag[static_cast<std::size_t>(at)] = b;
        point_sign(at) = mb.sign;
        ++at;
      }
    }
  }

  const double tag_mult = std::exp(-2.0 * kBoostGamma);
  Eigen::MatrixXd gram_base;
  Eigen::VectorXd base_sq;
  std::function<double(int, int)> kernel;
  if (m <= 3000) {
    base_sq = xbase.rowwise().squaredNorm();
    gram_base = xbase * xbase.transpose();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        gram_base(i, j) = std::exp(
            -kBoostGamma * std::max(0.0, base_sq(i) + base_sq(j) - 2.0 * gram_base(i, j)));
    kernel = [&](int a, int b) {
      const double base = gram_base(point_base[static_cast<std::size_t>(a)],
                                    point_base[static_cast<std::size_t>(b)]);
      return point_tag[static_cast<std::size_t>(a)] == point_tag[static_cast<std::size_t>(b)]
                 ? base
                 : base * tag_mult;
    };
  } else {
    base_sq = xbase.rowwise().squaredNorm();
    kernel = [&](int a, int b) {
      const int pa = point_base[static_cast<std::size_t>(a)];
      const int pb = point_base[static_cast<std::size_t>(b)];
      const double base = std::exp(
          -kBoostGamma *
          std::max(0.0, base_sq(pa) + base_sq(pb) - 2.0 * xbase.row(pa).dot(xbase.row(pb))));
      return point_tag[static_cast<std::size_t>(a)] == point_tag[static_cast<std::size_t>(b)]
                 ? base
                 : base * tag_mult;
    };
  }

  Eigen::VectorXd bag_weight = Eigen::VectorXd::Constant(n_bags, 1.0 / n_bags);
  std::vector<BoostRound> rounds;
  bool degenerate = false;

  for (int t = 0; t < p.rounds; ++t) {
    // Instances inherit their bag's label and share its weight.
    Eigen::VectorXd cost(total_points);
    for (int pt = 0; pt < total_points; ++pt) {
      const int b = point_bag[static_cast<std::size_t>(pt)];
      const double u = bag_weight(b) / case_count[static_cast<std::size_t>(
                                          derived[static_cast<std::size_t>(b)].case_index)];
      cost(pt) = std::max(p.base_cost * u * total_points, 1e-10);
    }

    BoostRound round;
    Eigen::VectorXd margins(total_points);
    if (point_sign.minCoeff() == point_sign.maxCoeff()) {
      // Single-class expansion: a constant scorer is already perfect.
      round.sv.resize(0, dim);
      round.dual_coefs.resize(0);
      round.bias = point_sign(0);
      margins.setConstant(point_sign(0));
    } else {
      const SmoResult sol =
          smo_solve(total_points, kernel, point_sign, cost, 1e-3, kBoostSmoSweeps,
                    detail::derive_seed(seed, static_cast<std::uint64_t>(t)));
      std::vector<int> sv;
      for (int pt = 0; pt < total_points; ++pt)
        if (sol.alpha(pt) > 1e-12) sv.push_back(pt);
      round.sv.resize(static_cast<Eigen::Index>(sv.size()), dim);
      round.dual_coefs.resize(static_cast<Eigen::Index>(sv.size()));
      round.sv_tags.resize(sv.size());
      for (std::size_t k = 0; k < sv.size(); ++k) {
        const int pt = sv[k];
        round.sv.row(static_cast<Eigen::Index>(k)) =
            xbase.row(point_base[static_cast<std::size_t>(pt)]);
        round.sv_tags[k] = point_tag[static_cast<std::size_t>(pt)];
        round.dual_coefs(static_cast<Eigen::Index>(k)) = sol.alpha(pt) * point_sign(pt);
      }
      round.bias = sol.bias;
      margins.setConstant(sol.bias);
      for (int pt = 0; pt < total_points; ++pt)
        for (std::size_t k = 0; k < sv.size(); ++k)
          margins(pt) += round.dual_coefs(static_cast<Eigen::Index>(k)) * kernel(pt, sv[k]);
    }

    // Bag score: sign of the mean instance margin.
    Eigen::VectorXd bag_score = Eigen::VectorXd::Zero(n_bags);
    for (int pt = 0; pt < total_points; ++pt)
      bag_score(point_bag[static_cast<std::size_t>(pt)]) += margins(pt);
    double err = 0.0;
    Eigen::VectorXd bag_pred(n_bags);
    for (int b = 0; b < n_bags; ++b) {
      bag_score(b) /= case_count[static_cast<std::size_t>(
          derived[static_cast<std::size_t>(b)].case_index)];
      bag_pred(b) = sign_of(bag_score(b));
      if (bag_pred(b) != derived[static_cast<std::size_t>(b)].sign) err += bag_weight(b);
    }

    if (err >= 0.5) {
      if (t == 0) degenerate = true;  // no better than chance from the start
      break;
    }
    const double clamped = std::max(err, kErrorFloor);
    round.coef = 0.5 * std::log((1.0 - clamped) / clamped);
    rounds.push_back(std::move(round));
    if (err <= kErrorFloor) break;  // perfect round, weights would not move

    for (int b = 0; b < n_bags; ++b)
      bag_weight(b) *= std::exp(-rounds.back().coef * derived[static_cast<std::size_t>(b)].sign *
                                bag_pred(b));
    bag_weight /= bag_weight.sum();
  }

  return std::make_unique<BoostModel>(d.manifest.label_names, dim, seed,
                                      boost_params_json(p), std::move(rounds), kBoostGamma,
                                      degenerate);
}

}  // namespace miml
