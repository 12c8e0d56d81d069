#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "miml/types.hpp"

namespace miml {

// Matrices travel as {"rows", "cols", "data"} with data flattened row-major.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json bag_to_json(const Bag& b);
Bag bag_from_json(const nlohmann::json& j);

nlohmann::json bags_to_json(const std::vector<Bag>& bags);
std::vector<Bag> bags_from_json(const nlohmann::json& j);

}  // namespace miml
