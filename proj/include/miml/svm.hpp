#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "miml/kernel.hpp"
#include "miml/types.hpp"

namespace miml {

struct SvmModel {
  Eigen::MatrixXd support_vectors;  // one row per support vector
  Eigen::VectorXd dual_coefs;       // alpha_i * y_i, same order
  Eigen::VectorXd alphas;           // alpha_i, kept for optimality checks
  std::vector<int> sv_indices;      // positions in the training set
  double bias = 0.0;
  KernelSpec kernel;
  double cost = 1.0;
  bool degenerate = false;  // single-class training input, constant score
};

// Dual solution of the kernel SVM subproblem: alphas for all n points plus
// the bias. `kernel` is evaluated lazily so callers can back it by a
// precomputed table.
struct SmoResult {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  int sweeps = 0;
};

SmoResult smo_solve(int n, const std::function<double(int, int)>& kernel,
                    const Eigen::VectorXd& y, const Eigen::VectorXd& cost_bound, double tol,
                    int max_sweeps, std::uint64_t seed);

// Trains by sequential minimal optimization. Single-class input yields a
// degenerate constant-score model rather than an error.
SvmModel train_binary_svm(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                          KernelSpec kernel, double cost, double tol = 1e-3,
                          std::uint64_t seed = 0);

// Same solver with a per-sample box constraint (used by the boosting learner).
SvmModel train_binary_svm_weighted(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                                   KernelSpec kernel, const Eigen::VectorXd& per_sample_cost,
                                   double tol = 1e-3, std::uint64_t seed = 0);

// sum_i dual_i * k(sv_i, x) + bias
double svm_margin(const SvmModel& m, const FeatureVector& x);

// Margins for many points at once; one row of `xs` per point.
Eigen::VectorXd svm_margin_batch(const SvmModel& m, const Eigen::MatrixXd& xs);

}  // namespace miml
