#include "miml/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace miml {

Bag bag_from_instances(const std::vector<FeatureVector>& instances) {
  if (instances.empty()) return Bag{};
  const Eigen::Index dim = instances.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(instances.size()), dim);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].size() != dim)
      throw std::invalid_argument("bag_from_instances: mixed instance dimensions");
    m.row(static_cast<Eigen::Index>(i)) = instances[i].transpose();
  }
  return Bag{std::move(m)};
}

LabelSet::LabelSet(std::initializer_list<int> labels) : LabelSet(std::vector<int>(labels)) {}

LabelSet::LabelSet(std::vector<int> labels) : members_(std::move(labels)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

void LabelSet::add(int label) {
  auto it = std::lower_bound(members_.begin(), members_.end(), label);
  if (it == members_.end() || *it != label) members_.insert(it, label);
}

bool LabelSet::contains(int label) const {
  return std::binary_search(members_.begin(), members_.end(), label);
}

int LabelSet::symmetric_difference_size(const LabelSet& other) const {
  std::size_t i = 0, j = 0, diff = 0;
  while (i < members_.size() && j < other.members_.size()) {
    if (members_[i] == other.members_[j]) {
      ++i;
      ++j;
    } else if (members_[i] < other.members_[j]) {
      ++i;
      ++diff;
    } else {
      ++j;
      ++diff;
    }
  }
  diff += (members_.size() - i) + (other.members_.size() - j);
  return static_cast<int>(diff);
}

Eigen::MatrixXd MIMLDataset::label_matrix() const {
  const int L = num_labels();
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cases.size()), L);
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (int l : cases[i].labels.values())
      if (l >= 0 && l < L) y(static_cast<Eigen::Index>(i), l) = 1.0;
  return y;
}

bool MIMLDataset::operator==(const MIMLDataset& other) const {
  if (manifest.format_version != other.manifest.format_version || manifest.dim != other.manifest.dim ||
      manifest.label_names != other.manifest.label_names ||
      manifest.provenance != other.manifest.provenance)
    return false;
  if (cases.size() != other.cases.size()) return false;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& a = cases[i];
    const Case& b = other.cases[i];
    if (a.case_id != b.case_id || a.expert_id != b.expert_id || a.labels != b.labels ||
        !(a.bag == b.bag))
      return false;
  }
  return true;
}

const std::vector<std::string> kDefaultLabelNames = {
    "Non proliferative changes only",
    "Usual ductal hyperplasia",
    "Atypical ductal hyperplasia",
    "Ductal carcinoma in situ",
    "Invasive carcinoma",
};

std::vector<Violation> validate_dataset(const MIMLDataset& d) {
  std::vector<Violation> out;
  const int L = d.num_labels();
  std::set<std::string> seen_ids;
  for (const Case& c : d.cases) {
    if (!seen_ids.insert(c.case_id).second)
      out.push_back({c.case_id, "duplicate-id", "case_id appears more than once"});
    if (c.bag.empty()) {
      out.push_back({c.case_id, "empty-bag", "bag has no instances"});
    } else {
      if (c.bag.dim() != d.manifest.dim) {
        std::ostringstream msg;
        msg << "bag dimension " << c.bag.dim() << " does not match manifest dimension "
            << d.manifest.dim;
        out.push_back({c.case_id, "dimension", msg.str()});
      }
      if (!c.bag.instances().allFinite())
        out.push_back({c.case_id, "non-finite", "bag contains a non-finite value"});
    }
    for (int l : c.labels.values()) {
      if (l < 0 || l >= L) {
        std::ostringstream msg;
        msg << "label index " << l << " outside vocabulary of size " << L;
        out.push_back({c.case_id, "vocabulary", msg.str()});
      }
    }
  }
  return out;
}

}  // namespace miml
