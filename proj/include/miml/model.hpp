#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "miml/types.hpp"

namespace miml {

struct Prediction {
  Eigen::VectorXd scores;  // length L
  LabelSet decided;
};

// Positive-score labels; when none is positive, the top-scoring label with
// ties broken toward the lowest index.
LabelSet decide_labels(const Eigen::VectorXd& scores);

// Uniform train/predict contract shared by the six learners. Models are
// immutable after training and safe to score concurrently.
class Model {
 public:
  virtual ~Model() = default;

  const std::string& algorithm() const { return algorithm_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  int num_labels() const { return static_cast<int>(label_names_.size()); }
  int input_dim() const { return input_dim_; }
  std::uint64_t seed() const { return seed_; }
  const nlohmann::json& params() const { return params_; }

  virtual Eigen::VectorXd score(const Bag& bag) const = 0;

  // Algorithm-specific state, matrices flattened row-major.
  virtual nlohmann::json payload() const = 0;

 protected:
  Model(std::string algorithm, std::vector<std::string> label_names, int input_dim,
        std::uint64_t seed, nlohmann::json params)
      : algorithm_(std::move(algorithm)),
        label_names_(std::move(label_names)),
        input_dim_(input_dim),
        seed_(seed),
        params_(std::move(params)) {}

 private:
  std::string algorithm_;
  std::vector<std::string> label_names_;
  int input_dim_ = 0;
  std::uint64_t seed_ = 0;
  nlohmann::json params_;
};

Prediction predict(const Model& m, const Bag& bag);

nlohmann::json model_to_json(const Model& m);
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

void save_model(const Model& m, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& path);

}  // namespace miml
