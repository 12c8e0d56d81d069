#pragma once

#include <stdexcept>
#include <string>

#include "miml/types.hpp"

namespace miml {

// Load or validation failure; the message names the offending file, line, or
// case.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// On-disk layout: DIR/manifest.json plus DIR/cases.jsonl, one case per line.
// Floats survive a save/load round trip bit-exactly.
MIMLDataset load_dataset(const std::string& dir);
void save_dataset(const MIMLDataset& d, const std::string& dir);

// Content hash over the canonical serialization (FNV-1a); used to show the
// benchmark leaves datasets untouched.
std::uint64_t dataset_fingerprint(const MIMLDataset& d);

}  // namespace miml
