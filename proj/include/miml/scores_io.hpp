#pragma once

#include <string>
#include <vector>

#include "miml/types.hpp"

namespace miml {

// One prediction dump row: the case, its L scores, and the decided labels.
struct ScoreRow {
  std::string case_id;
  Eigen::VectorXd scores;
  LabelSet decided;
};

// CSV with header case_id,score_0,...,score_{L-1},decided; scores keep full
// precision, the decided set is semicolon-joined indices.
void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows,
                      int num_labels);
std::vector<ScoreRow> read_scores_csv(const std::string& path);

}  // namespace miml
