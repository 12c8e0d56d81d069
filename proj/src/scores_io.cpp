#include "miml/scores_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "miml/dataset_io.hpp"

namespace miml {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows,
                      int num_labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "case_id";
  for (int l = 0; l < num_labels; ++l) out << ",score_" << l;
  out << ",decided\n";
  char buf[64];
  for (const ScoreRow& r : rows) {
    if (r.case_id.find_first_of(",\"\n") != std::string::npos)
      throw DataError(path + ": case_id '" + r.case_id + "' contains CSV delimiters");
    if (r.scores.size() != num_labels)
      throw DataError(path + ": case '" + r.case_id + "' has wrong score length");
    out << r.case_id;
    for (int l = 0; l < num_labels; ++l) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.scores(l));
      out << "," << buf;
    }
    out << ",";
    bool first = true;
    for (int l : r.decided.values()) {
      if (!first) out << ";";
      out << l;
      first = false;
    }
    out << "\n";
  }
  if (!out) throw DataError(path + ": write failed");
}

std::vector<ScoreRow> read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty scores file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "case_id" || header.back() != "decided")
    throw DataError(path + ":1: expected header case_id,score_0,...,decided");
  const int num_labels = static_cast<int>(header.size()) - 2;
  for (int l = 0; l < num_labels; ++l)
    if (header[static_cast<std::size_t>(l) + 1] != "score_" + std::to_string(l))
      throw DataError(path + ":1: unexpected score column '" +
                      header[static_cast<std::size_t>(l) + 1] + "'");

  std::vector<ScoreRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    ScoreRow r;
    r.case_id = fields[0];
    r.scores.resize(num_labels);
    for (int l = 0; l < num_labels; ++l) {
      try {
        r.scores(l) = std::stod(fields[static_cast<std::size_t>(l) + 1]);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": bad score '" +
                        fields[static_cast<std::size_t>(l) + 1] + "'");
      }
    }
    const std::string& decided = fields.back();
    if (!decided.empty()) {
      std::istringstream ds(decided);
      std::string tok;
      while (std::getline(ds, tok, ';')) {
        try {
          r.decided.add(std::stoi(tok));
        } catch (const std::exception&) {
          throw DataError(path + ":" + std::to_string(line_no) + ": bad decided entry '" +
                          tok + "'");
        }
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace miml
