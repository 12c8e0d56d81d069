#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miml/types.hpp"

namespace miml {
namespace detail {

// Trainers reuse the dataset validator so bad data fails up front.
void require_trainable(const MIMLDataset& d, const char* who, int min_cases);

// 0/1 indicators mapped to -1/+1 targets.
inline Eigen::MatrixXd sign_targets(const Eigen::MatrixXd& y01) {
  return 2.0 * y01.array() - 1.0;
}

std::vector<Bag> dataset_bags(const MIMLDataset& d);

// splitmix64 step, used to derive independent per-label sub-seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail
}  // namespace miml
