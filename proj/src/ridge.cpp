#include "miml/ridge.hpp"

#include <stdexcept>

namespace miml {

namespace {

Eigen::MatrixXd solve_normal_equations(const Eigen::MatrixXd& phi,
                                       const Eigen::MatrixXd& targets, double lambda) {
  if (!phi.allFinite() || !targets.allFinite())
    throw std::invalid_argument("ridge_solve: non-finite input");
  if (phi.rows() != targets.rows())
    throw std::invalid_argument("ridge_solve: row count mismatch");
  if (phi.rows() < 1) throw std::invalid_argument("ridge_solve: empty design matrix");
  if (lambda < 0.0) throw std::invalid_argument("ridge_solve: negative lambda");

  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += lambda;
  return gram.ldlt().solve(phi.transpose() * targets);  // p x q
}

}  // namespace

LinearMap ridge_solve(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& targets,
                      double lambda) {
  LinearMap m;
  m.weight = solve_normal_equations(phi, targets, lambda).transpose();
  m.bias = Eigen::VectorXd::Zero(targets.cols());
  return m;
}

LinearMap ridge_solve_affine(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& targets,
                             double lambda) {
  Eigen::MatrixXd aug(phi.rows(), phi.cols() + 1);
  aug.leftCols(phi.cols()) = phi;
  aug.col(phi.cols()).setOnes();
  const Eigen::MatrixXd sol = solve_normal_equations(aug, targets, lambda);  // (p+1) x q
  LinearMap m;
  m.weight = sol.topRows(phi.cols()).transpose();
  m.bias = sol.row(phi.cols()).transpose();
  return m;
}

}  // namespace miml
