#pragma once

#include "miml/types.hpp"

namespace miml {

// Used when callers ask for plain least squares; keeps near-singular
// normal equations solvable.
inline constexpr double kRidgeDefaultLambda = 1e-6;

struct LinearMap {
  Eigen::MatrixXd weight;  // out_dim x in_dim
  Eigen::VectorXd bias;    // out_dim

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return weight * x + bias; }

  // One input per row of `xs`; returns one output per row.
  Eigen::MatrixXd apply_batch(const Eigen::MatrixXd& xs) const {
    return (xs * weight.transpose()).rowwise() + bias.transpose();
  }
};

// Minimizes ||phi * W' - targets||^2 + lambda * ||W||^2 via the regularized
// normal equations; bias is left at zero.
LinearMap ridge_solve(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& targets,
                      double lambda);

// Same fit with a constant unit appended to phi; the extra coefficient
// becomes the bias (and is regularized along with the weights).
LinearMap ridge_solve_affine(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& targets,
                             double lambda);

}  // namespace miml
