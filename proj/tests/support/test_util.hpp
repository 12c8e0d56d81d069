#pragma once

#include <vector>

#include "miml/rng.hpp"
#include "miml/types.hpp"

namespace miml::testutil {

inline FeatureVector vec(std::initializer_list<double> values) {
  FeatureVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Bag bag(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<FeatureVector> instances;
  for (const auto& r : rows) instances.push_back(vec(r));
  return bag_from_instances(instances);
}

inline FeatureVector random_vector(Rng& rng, int dim, double lo = -5.0, double hi = 5.0) {
  FeatureVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

inline Bag random_bag(Rng& rng, int dim, int max_size = 6) {
  const int size = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(max_size)));
  Eigen::MatrixXd m(size, dim);
  for (int i = 0; i < size; ++i) m.row(i) = random_vector(rng, dim).transpose();
  return Bag{std::move(m)};
}

// The easy separable fixture: 12 bags in 2-D with L=2. Label-0 bags hold
// instances near (0,10), label-1 bags near (10,0), dual-label bags both,
// and every bag one background instance near the origin. Labels are exactly
// recoverable from instance positions (see verify_d_easy_oracle).
inline MIMLDataset make_d_easy() {
  MIMLDataset d;
  d.manifest.dim = 2;
  d.manifest.label_names = {"north", "east"};
  d.manifest.provenance = "d_easy fixture";
  Rng rng(20240501);

  const auto jitter = [&rng]() { return rng.uniform(-0.1, 0.1); };
  int id = 0;
  const auto add_case = [&](int n0, int n1) {
    std::vector<FeatureVector> instances;
    for (int k = 0; k < n0; ++k) instances.push_back(vec({0.0 + jitter(), 10.0 + jitter()}));
    for (int k = 0; k < n1; ++k) instances.push_back(vec({10.0 + jitter(), 0.0 + jitter()}));
    instances.push_back(vec({jitter(), jitter()}));  // background
    Case c;
    c.case_id = "easy-" + std::to_string(id++);
    c.expert_id = "fixture";
    c.bag = bag_from_instances(instances);
    if (n0 > 0) c.labels.add(0);
    if (n1 > 0) c.labels.add(1);
    d.cases.push_back(std::move(c));
  };
  for (int i = 0; i < 5; ++i) add_case(2, 0);
  for (int i = 0; i < 5; ++i) add_case(0, 2);
  add_case(1, 1);
  add_case(1, 1);
  return d;
}

// Brute-force nearest-center classification of every instance; a bag carries
// label l iff some instance falls nearest to that label's cluster center.
inline LabelSet d_easy_oracle_labels(const Bag& b) {
  const FeatureVector centers[3] = {vec({0.0, 10.0}), vec({10.0, 0.0}), vec({0.0, 0.0})};
  LabelSet labels;
  for (int i = 0; i < b.size(); ++i) {
    int best = 0;
    double best_d = (b.instance(i) - centers[0]).norm();
    for (int c = 1; c < 3; ++c) {
      const double dc = (b.instance(i) - centers[c]).norm();
      if (dc < best_d) {
        best_d = dc;
        best = c;
      }
    }
    if (best < 2) labels.add(best);
  }
  return labels;
}

inline bool verify_d_easy_oracle(const MIMLDataset& d) {
  for (const Case& c : d.cases)
    if (!(d_easy_oracle_labels(c.bag) == c.labels)) return false;
  return true;
}

}  // namespace miml::testutil
