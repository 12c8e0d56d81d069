#include "miml/cluster.hpp"

#include <limits>
#include <stdexcept>

#include "miml/rng.hpp"

namespace miml {

namespace {

double assignment_cost(const Eigen::MatrixXd& d, const std::vector<int>& medoids,
                       std::vector<int>* assignment) {
  const int n = static_cast<int>(d.rows());
  double total = 0.0;
  if (assignment) assignment->assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_m = 0;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      const double v = d(i, medoids[m]);
      if (v < best) {
        best = v;
        best_m = static_cast<int>(m);
      }
    }
    total += best;
    if (assignment) (*assignment)[static_cast<std::size_t>(i)] = best_m;
  }
  return total;
}

}  // namespace

KMedoidsResult k_medoids(int n_items, const std::function<double(int, int)>& dist, int k,
                         std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k_medoids: k must be positive");
  if (k > n_items) throw std::invalid_argument("k_medoids: k exceeds the number of items");

  Eigen::MatrixXd d(n_items, n_items);
  for (int i = 0; i < n_items; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n_items; ++j) {
      const double v = dist(i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }

  Rng rng(seed);
  const std::vector<int> order = rng.permutation(n_items);

  // Greedy build: each new medoid is the candidate that lowers total cost
  // the most, scanning candidates in the shuffled order so ties are seeded.
  KMedoidsResult res;
  std::vector<bool> is_medoid(static_cast<std::size_t>(n_items), false);
  for (int chosen = 0; chosen < k; ++chosen) {
    int best_cand = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int cand : order) {
      if (is_medoid[static_cast<std::size_t>(cand)]) continue;
      res.medoids.push_back(cand);
      const double c = assignment_cost(d, res.medoids, nullptr);
      res.medoids.pop_back();
      if (c < best_cost) {
        best_cost = c;
        best_cand = cand;
      }
    }
    res.medoids.push_back(best_cand);
    is_medoid[static_cast<std::size_t>(best_cand)] = true;
  }
  res.cost = assignment_cost(d, res.medoids, &res.assignment);
  res.cost_trace.push_back(res.cost);

  // First-improvement swap phase.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t m = 0; m < res.medoids.size() && !improved; ++m) {
      for (int cand : order) {
        if (is_medoid[static_cast<std::size_t>(cand)]) continue;
        const int old = res.medoids[m];
        res.medoids[m] = cand;
        const double c = assignment_cost(d, res.medoids, nullptr);
        if (c < res.cost - 1e-12) {
          is_medoid[static_cast<std::size_t>(old)] = false;
          is_medoid[static_cast<std::size_t>(cand)] = true;
          res.cost = c;
          res.cost_trace.push_back(c);
          improved = true;
          break;
        }
        res.medoids[m] = old;
      }
    }
  }
  res.cost = assignment_cost(d, res.medoids, &res.assignment);
  return res;
}

KMeansResult k_means(const Eigen::MatrixXd& vectors, int k, std::uint64_t seed,
                     int max_iters) {
  const int n = static_cast<int>(vectors.rows());
  if (k < 1) throw std::invalid_argument("k_means: k must be positive");
  if (k > n) throw std::invalid_argument("k_means: k exceeds the number of vectors");

  Rng rng(seed);
  KMeansResult res;
  res.centroids.resize(k, vectors.cols());

  // k-means++ seeding.
  std::vector<int> chosen;
  chosen.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 =
      (vectors.rowwise() - vectors.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    } else {
      double target = rng.uniform01() * total;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
    d2 = d2.cwiseMin(
        (vectors.rowwise() - vectors.row(pick)).rowwise().squaredNorm().eval());
  }
  for (int c = 0; c < k; ++c) res.centroids.row(c) = vectors.row(chosen[static_cast<std::size_t>(c)]);

  res.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    // Assign.
    bool changed = false;
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double v = (vectors.row(i) - res.centroids.row(c)).squaredNorm();
        if (v < best) {
          best = v;
          best_c = c;
        }
      }
      inertia += best;
      if (res.assignment[static_cast<std::size_t>(i)] != best_c) {
        res.assignment[static_cast<std::size_t>(i)] = best_c;
        changed = true;
      }
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    if (!changed) break;

    // Update.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, vectors.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      const int c = res.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += vectors.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        res.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      } else {
        // Re-seed an empty cluster from the point farthest from its centroid.
        double worst = -1.0;
        int worst_i = 0;
        for (int i = 0; i < n; ++i) {
          const double v =
              (vectors.row(i) -
               res.centroids.row(res.assignment[static_cast<std::size_t>(i)]))
                  .squaredNorm();
          if (v > worst) {
            worst = v;
            worst_i = i;
          }
        }
        res.centroids.row(c) = vectors.row(worst_i);
      }
    }
  }
  return res;
}

}  // namespace miml
