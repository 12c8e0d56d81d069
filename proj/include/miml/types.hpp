#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <string>
#include <vector>

namespace miml {

// An instance inside a bag. The histopathology pipeline produces 256-bin
// LBP histograms, but any fixed dimension is accepted.
using FeatureVector = Eigen::VectorXd;

// A bag of instances stored as rows of a dense matrix, so every instance
// shares one dimension by construction.
class Bag {
 public:
  Bag() = default;
  explicit Bag(Eigen::MatrixXd instances) : instances_(std::move(instances)) {}

  int size() const { return static_cast<int>(instances_.rows()); }
  int dim() const { return static_cast<int>(instances_.cols()); }
  bool empty() const { return instances_.rows() == 0; }

  FeatureVector instance(int i) const { return instances_.row(i).transpose(); }
  const Eigen::MatrixXd& instances() const { return instances_; }

  bool operator==(const Bag& other) const {
    return instances_.rows() == other.instances_.rows() &&
           instances_.cols() == other.instances_.cols() &&
           instances_ == other.instances_;
  }

 private:
  Eigen::MatrixXd instances_;  // one row per instance
};

Bag bag_from_instances(const std::vector<FeatureVector>& instances);

// Subset of {0..L-1}, kept sorted and unique. The vocabulary size lives in
// the dataset manifest; bounds are checked by validate_dataset.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<int> labels);
  explicit LabelSet(std::vector<int> labels);

  void add(int label);
  bool contains(int label) const;
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const std::vector<int>& values() const { return members_; }

  int symmetric_difference_size(const LabelSet& other) const;

  bool operator==(const LabelSet& other) const { return members_ == other.members_; }
  bool operator!=(const LabelSet& other) const { return members_ != other.members_; }

 private:
  std::vector<int> members_;  // sorted, unique
};

// One (image, expert) pair: a bag of ROI features plus that expert's labels.
struct Case {
  std::string case_id;
  std::string expert_id;
  Bag bag;
  LabelSet labels;
};

struct DatasetManifest {
  int format_version = 1;
  int dim = 0;
  std::vector<std::string> label_names;
  std::string provenance;

  int num_labels() const { return static_cast<int>(label_names.size()); }
};

struct MIMLDataset {
  DatasetManifest manifest;
  std::vector<Case> cases;

  int num_labels() const { return manifest.num_labels(); }
  int dim() const { return manifest.dim; }
  int num_cases() const { return static_cast<int>(cases.size()); }

  // n x L matrix of 0/1 label indicators, in case order.
  Eigen::MatrixXd label_matrix() const;

  bool operator==(const MIMLDataset& other) const;
};

// The five diagnosis classes used when no vocabulary is supplied.
extern const std::vector<std::string> kDefaultLabelNames;

struct Violation {
  std::string case_id;
  std::string rule;    // "dimension", "vocabulary", "empty-bag", "non-finite", "duplicate-id"
  std::string detail;
};

// Empty result iff every type invariant holds. Violations are data, not errors.
std::vector<Violation> validate_dataset(const MIMLDataset& d);

}  // namespace miml
