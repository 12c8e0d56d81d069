#include "miml/synth.hpp"

#include <cstdio>
#include <stdexcept>

#include "miml/rng.hpp"

namespace miml {

namespace {

// Deterministic center placement with pairwise distance >= separation:
// label l sits at separation * (1 + floor(l / dim)) along axis (l mod dim).
Eigen::MatrixXd place_centers(int num_labels, int dim, double separation) {
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(num_labels, dim);
  for (int l = 0; l < num_labels; ++l) {
    const int axis = l % dim;
    const double scale = 1.0 + static_cast<double>(l / dim);
    centers(l, axis) = separation * scale;
  }
  return centers;
}

}  // namespace

MIMLDataset generate_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  if (cfg.n_bags < 1 || cfg.num_labels < 1 || cfg.dim < 1 || cfg.instances_per_label < 1 ||
      cfg.background_instances < 0)
    throw std::invalid_argument("generate_synthetic: counts must be positive");
  if (cfg.sigma <= 0.0 || cfg.center_separation <= 0.0)
    throw std::invalid_argument("generate_synthetic: sigma and separation must be positive");
  if (cfg.cardinality_probs.empty())
    throw std::invalid_argument("generate_synthetic: cardinality distribution is empty");

  // Truncate the cardinality distribution at L and renormalize.
  std::vector<double> probs(cfg.cardinality_probs.begin(),
                            cfg.cardinality_probs.begin() +
                                std::min<std::size_t>(cfg.cardinality_probs.size(),
                                                      static_cast<std::size_t>(cfg.num_labels)));
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("generate_synthetic: negative probability");
    total += p;
  }
  if (total <= 0.0) throw std::invalid_argument("generate_synthetic: zero-mass distribution");
  for (double& p : probs) p /= total;

  const Eigen::MatrixXd centers =
      place_centers(cfg.num_labels, cfg.dim, cfg.center_separation);

  MIMLDataset d;
  d.manifest.dim = cfg.dim;
  for (int l = 0; l < cfg.num_labels; ++l)
    d.manifest.label_names.push_back("class-" + std::to_string(l));
  {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "gen-synth seed=%llu bags=%d labels=%d dim=%d",
                  static_cast<unsigned long long>(seed), cfg.n_bags, cfg.num_labels, cfg.dim);
    d.manifest.provenance = buf;
  }

  Rng rng(seed);
  for (int b = 0; b < cfg.n_bags; ++b) {
    // Sample the label-set size, then that many distinct labels.
    const double u = rng.uniform01();
    int cardinality = 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) {
        cardinality = static_cast<int>(k) + 1;
        break;
      }
      cardinality = static_cast<int>(probs.size());
    }
    std::vector<int> pool = rng.permutation(cfg.num_labels);
    LabelSet labels(std::vector<int>(pool.begin(), pool.begin() + cardinality));

    const int rows = cardinality * cfg.instances_per_label + cfg.background_instances;
    Eigen::MatrixXd instances(rows, cfg.dim);
    int at = 0;
    for (int l : labels.values())
      for (int k = 0; k < cfg.instances_per_label; ++k) {
        for (int c = 0; c < cfg.dim; ++c)
          instances(at, c) = centers(l, c) + cfg.sigma * rng.normal();
        ++at;
      }
    for (int k = 0; k < cfg.background_instances; ++k) {
      for (int c = 0; c < cfg.dim; ++c) instances(at, c) = cfg.sigma * rng.normal();
      ++at;
    }

    Case c;
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%06d", b);
    c.case_id = id;
    c.expert_id = "synth";
    c.bag = Bag{std::move(instances)};
    c.labels = labels;
    d.cases.push_back(std::move(c));
  }
  return d;
}

}  // namespace miml
