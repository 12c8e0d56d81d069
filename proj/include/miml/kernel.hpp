#pragma once

#include "miml/types.hpp"

namespace miml {

// RBF is the only kernel the bag-level learners use.
struct KernelSpec {
  double gamma = 1.0;  // > 0
};

// exp(-gamma * ||x - y||^2), in (0, 1].
double rbf_kernel(const FeatureVector& x, const FeatureVector& y, double gamma);

}  // namespace miml
