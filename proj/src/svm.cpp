#include "miml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "miml/rng.hpp"

namespace miml {

double rbf_kernel(const FeatureVector& x, const FeatureVector& y, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("rbf_kernel: gamma must be positive");
  if (x.size() != y.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
  return std::exp(-gamma * (x - y).squaredNorm());
}

namespace {

constexpr double kAlphaEps = 1e-12;
constexpr double kStepEps = 1e-8;

// K(i,j) = exp(-gamma * ||x_i - x_j||^2) for all pairs.
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& xs, double gamma) {
  const Eigen::VectorXd sq = xs.rowwise().squaredNorm();
  Eigen::MatrixXd k = xs * xs.transpose();
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      k(i, j) = std::exp(-gamma * std::max(0.0, sq(i) + sq(j) - 2.0 * k(i, j)));
  return k;
}

class SmoSolver {
 public:
  SmoSolver(int n, const std::function<double(int, int)>& kernel, const Eigen::VectorXd& y,
            const Eigen::VectorXd& cost, double tol, std::uint64_t seed)
      : n_(n), kernel_(kernel), y_(y), cost_(cost), tol_(tol), rng_(seed) {
    alpha_ = Eigen::VectorXd::Zero(n_);
    errors_ = -y_;  // f == 0 at the start
    kdiag_.resize(n_);
    for (int i = 0; i < n_; ++i) kdiag_(i) = kernel_(i, i);
  }

  SmoResult run(int max_sweeps) {
    bool examine_all = true;
    int num_changed = 0;
    int sweeps = 0;
    while ((num_changed > 0 || examine_all) && sweeps < max_sweeps) {
      num_changed = 0;
      for (int i = 0; i < n_; ++i) {
        if (examine_all || (alpha_(i) > kAlphaEps && alpha_(i) < cost_(i) - kAlphaEps))
          num_changed += examine(i);
      }
      ++sweeps;
      if (examine_all)
        examine_all = false;
      else if (num_changed == 0)
        examine_all = true;
    }
    return SmoResult{alpha_, bias_, sweeps};
  }

 private:
  bool non_bound(int i) const {
    return alpha_(i) > kAlphaEps && alpha_(i) < cost_(i) - kAlphaEps;
  }

  int examine(int i2) {
    const double y2 = y_(i2);
    const double a2 = alpha_(i2);
    const double e2 = errors_(i2);
    const double r2 = e2 * y2;
    const bool violated = (r2 < -tol_ && a2 < cost_(i2) - kAlphaEps) ||
                          (r2 > tol_ && a2 > kAlphaEps);
    if (!violated) return 0;

    // Second-choice heuristic: largest |E1 - E2| over non-bound points.
    int best = -1;
    double best_gap = -1.0;
    for (int i = 0; i < n_; ++i) {
      if (!non_bound(i)) continue;
      const double gap = std::abs(errors_(i) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    const int offset1 = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(n_)));
    for (int d = 0; d < n_; ++d) {
      const int i1 = (offset1 + d) % n_;
      if (non_bound(i1) && take_step(i1, i2)) return 1;
    }
    const int offset2 = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(n_)));
    for (int d = 0; d < n_; ++d) {
      const int i1 = (offset2 + d) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(int i1, int i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_(i1), a2 = alpha_(i2);
    const double y1 = y_(i1), y2 = y_(i2);
    const double e1 = errors_(i1), e2 = errors_(i2);
    const double c1 = cost_(i1), c2 = cost_(i2);
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c2, c1 + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c1);
      hi = std::min(c2, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = kdiag_(i1);
    const double k22 = kdiag_(i2);
    const double k12 = kernel_(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = a2 + y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_new, lo, hi);
    } else {
      // Flat direction: compare the dual objective at both clip ends.
      const double f1 = y1 * (e1 + bias_) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 + bias_) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - kStepEps)
        a2_new = lo;
      else if (obj_lo > obj_hi + kStepEps)
        a2_new = hi;
      else
        return false;
    }
    if (std::abs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    a1_new = std::clamp(a1_new, 0.0, c1);
    if (a1_new < kAlphaEps) a1_new = 0.0;
    if (c1 - a1_new < kAlphaEps) a1_new = c1;
    if (a2_new < kAlphaEps) a2_new = 0.0;
    if (c2 - a2_new < kAlphaEps) a2_new = c2;

    const double d1 = (a1_new - a1) * y1;
    const double d2 = (a2_new - a2) * y2;
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > kAlphaEps && a1_new < c1 - kAlphaEps)
      b_new = b1;
    else if (a2_new > kAlphaEps && a2_new < c2 - kAlphaEps)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);

    const double db = b_new - bias_;
    for (int k = 0; k < n_; ++k)
      errors_(k) += d1 * kernel_(i1, k) + d2 * kernel_(i2, k) + db;

    alpha_(i1) = a1_new;
    alpha_(i2) = a2_new;
    bias_ = b_new;
    return true;
  }

  int n_;
  const std::function<double(int, int)>& kernel_;
  Eigen::VectorXd y_;
  Eigen::VectorXd cost_;
  double tol_;
  Rng rng_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd errors_;  // f(x_i) - y_i, kept for every point
  Eigen::VectorXd kdiag_;
  double bias_ = 0.0;
};

SvmModel fit_from_solution(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                           KernelSpec kernel, double cost, const SmoResult& sol) {
  SvmModel m;
  m.kernel = kernel;
  m.cost = cost;
  m.bias = sol.bias;
  std::vector<int> kept;
  for (int i = 0; i < sol.alpha.size(); ++i)
    if (sol.alpha(i) > kAlphaEps) kept.push_back(i);
  m.support_vectors.resize(static_cast<Eigen::Index>(kept.size()), xs.cols());
  m.dual_coefs.resize(static_cast<Eigen::Index>(kept.size()));
  m.alphas.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const int i = kept[k];
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = xs.row(i);
    m.dual_coefs(static_cast<Eigen::Index>(k)) = sol.alpha(i) * ys(i);
    m.alphas(static_cast<Eigen::Index>(k)) = sol.alpha(i);
    m.sv_indices.push_back(i);
  }
  return m;
}

SvmModel train_svm_impl(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                        KernelSpec kernel, const Eigen::VectorXd& cost_bound,
                        double mean_cost, double tol, std::uint64_t seed) {
  const int n = static_cast<int>(xs.rows());
  if (ys.size() != n || n < 2)
    throw std::invalid_argument("train_binary_svm: need at least two labelled points");
  for (int i = 0; i < n; ++i)
    if (ys(i) != 1.0 && ys(i) != -1.0)
      throw std::invalid_argument("train_binary_svm: labels must be +1 or -1");
  if (kernel.gamma <= 0.0)
    throw std::invalid_argument("train_binary_svm: gamma must be positive");
  if (cost_bound.minCoeff() <= 0.0)
    throw std::invalid_argument("train_binary_svm: cost must be positive");

  if (ys.minCoeff() == ys.maxCoeff()) {
    SvmModel m;
    m.kernel = kernel;
    m.cost = mean_cost;
    m.bias = ys(0);  // constant score with the sign of the only class
    m.degenerate = true;
    return m;
  }

  std::function<double(int, int)> k;
  Eigen::MatrixXd gram;
  Eigen::VectorXd sq;
  if (n <= 2048) {
    gram = rbf_gram(xs, kernel.gamma);
    k = [&gram](int i, int j) { return gram(i, j); };
  } else {
    sq = xs.rowwise().squaredNorm();
    k = [&xs, &sq, g = kernel.gamma](int i, int j) {
      return std::exp(-g * std::max(0.0, sq(i) + sq(j) - 2.0 * xs.row(i).dot(xs.row(j))));
    };
  }

  const SmoResult sol = smo_solve(n, k, ys, cost_bound, tol, 100, seed);
  return fit_from_solution(xs, ys, kernel, mean_cost, sol);
}

}  // namespace

SmoResult smo_solve(int n, const std::function<double(int, int)>& kernel,
                    const Eigen::VectorXd& y, const Eigen::VectorXd& cost_bound, double tol,
                    int max_sweeps, std::uint64_t seed) {
  SmoSolver solver(n, kernel, y, cost_bound, tol, seed);
  return solver.run(max_sweeps);
}

SvmModel train_binary_svm(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                          KernelSpec kernel, double cost, double tol, std::uint64_t seed) {
  return train_svm_impl(xs, ys, kernel,
                        Eigen::VectorXd::Constant(xs.rows(), cost), cost, tol, seed);
}

SvmModel train_binary_svm_weighted(const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys,
                                   KernelSpec kernel, const Eigen::VectorXd& per_sample_cost,
                                   double tol, std::uint64_t seed) {
  if (per_sample_cost.size() != xs.rows())
    throw std::invalid_argument("train_binary_svm_weighted: cost size mismatch");
  return train_svm_impl(xs, ys, kernel, per_sample_cost, per_sample_cost.mean(), tol, seed);
}

double svm_margin(const SvmModel& m, const FeatureVector& x) {
  if (m.support_vectors.rows() == 0) return m.bias;
  if (x.size() != m.support_vectors.cols())
    throw std::invalid_argument("svm_margin: dimension mismatch");
  double acc = m.bias;
  for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i)
    acc += m.dual_coefs(i) *
           std::exp(-m.kernel.gamma *
                    (m.support_vectors.row(i).transpose() - x).squaredNorm());
  return acc;
}

Eigen::VectorXd svm_margin_batch(const SvmModel& m, const Eigen::MatrixXd& xs) {
  if (m.support_vectors.rows() == 0)
    return Eigen::VectorXd::Constant(xs.rows(), m.bias);
  if (xs.cols() != m.support_vectors.cols())
    throw std::invalid_argument("svm_margin_batch: dimension mismatch");
  const Eigen::VectorXd xsq = xs.rowwise().squaredNorm();
  const Eigen::VectorXd ssq = m.support_vectors.rowwise().squaredNorm();
  Eigen::MatrixXd cross = xs * m.support_vectors.transpose();  // N x m
  for (Eigen::Index i = 0; i < cross.rows(); ++i)
    for (Eigen::Index j = 0; j < cross.cols(); ++j)
      cross(i, j) =
          std::exp(-m.kernel.gamma * std::max(0.0, xsq(i) + ssq(j) - 2.0 * cross(i, j)));
  return (cross * m.dual_coefs).array() + m.bias;
}

}  // namespace miml
