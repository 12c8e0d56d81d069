#include "miml/model.hpp"

#include <fstream>
#include <stdexcept>

#include "miml/json_util.hpp"
#include "miml/learners.hpp"

namespace miml {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: data length mismatch");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data.at(k++).get<double>();
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  std::vector<double> data(v.data(), v.data() + v.size());
  return nlohmann::json(data);
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

nlohmann::json bag_to_json(const Bag& b) { return matrix_to_json(b.instances()); }

Bag bag_from_json(const nlohmann::json& j) { return Bag{matrix_from_json(j)}; }

nlohmann::json bags_to_json(const std::vector<Bag>& bags) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Bag& b : bags) arr.push_back(bag_to_json(b));
  return arr;
}

std::vector<Bag> bags_from_json(const nlohmann::json& j) {
  std::vector<Bag> bags;
  bags.reserve(j.size());
  for (const auto& item : j) bags.push_back(bag_from_json(item));
  return bags;
}

LabelSet decide_labels(const Eigen::VectorXd& scores) {
  LabelSet decided;
  for (Eigen::Index l = 0; l < scores.size(); ++l)
    if (scores(l) > 0.0) decided.add(static_cast<int>(l));
  if (decided.empty() && scores.size() > 0) {
    Eigen::Index best = 0;
    for (Eigen::Index l = 1; l < scores.size(); ++l)
      if (scores(l) > scores(best)) best = l;  // strict: ties keep the lowest index
    decided.add(static_cast<int>(best));
  }
  return decided;
}

Prediction predict(const Model& m, const Bag& bag) {
  if (bag.empty()) throw std::invalid_argument("predict: empty bag");
  if (bag.dim() != m.input_dim())
    throw std::invalid_argument("predict: bag dimension " + std::to_string(bag.dim()) +
                                " does not match model dimension " +
                                std::to_string(m.input_dim()));
  Prediction p;
  p.scores = m.score(bag);
  p.decided = decide_labels(p.scores);
  return p;
}

nlohmann::json model_to_json(const Model& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["algorithm"] = m.algorithm();
  j["params"] = m.params();
  j["seed"] = m.seed();
  j["label_names"] = m.label_names();
  j["input_dim"] = m.input_dim();
  j["payload"] = m.payload();
  return j;
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
  const std::string algorithm = j.at("algorithm").get<std::string>();
  auto label_names = j.at("label_names").get<std::vector<std::string>>();
  const int input_dim = j.at("input_dim").get<int>();
  const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  nlohmann::json params = j.at("params");
  const nlohmann::json& payload = j.at("payload");
  if (algorithm == "mimlknn")
    return KnnModel::from_payload(std::move(label_names), input_dim, seed, std::move(params),
                                  payload);
  if (algorithm == "mimlrbf")
    return RbfModel::from_payload(std::move(label_names), input_dim, seed, std::move(params),
                                  payload);
  if (algorithm == "mimlsvm")
    return MimlSvmModel::from_payload(std::move(label_names), input_dim, seed,
                                      std::move(params), payload);
  if (algorithm == "mimlboost")
    return BoostModel::from_payload(std::move(label_names), input_dim, seed,
                                    std::move(params), payload);
  if (algorithm == "m3miml")
    return M3MimlModel::from_payload(std::move(label_names), input_dim, seed,
                                     std::move(params), payload);
  if (algorithm == "kisar")
    return KisarModel::from_payload(std::move(label_names), input_dim, seed,
                                    std::move(params), payload);
  throw std::invalid_argument("model_from_json: unknown algorithm '" + algorithm + "'");
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument(path + ": cannot open for writing");
  out << model_to_json(m).dump(2) << "\n";
  if (!out) throw std::invalid_argument(path + ": write failed");
}

std::unique_ptr<Model> load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": malformed model file: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace miml
