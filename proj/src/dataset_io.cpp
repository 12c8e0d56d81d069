#include "miml/dataset_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "miml/json_util.hpp"

namespace miml {

namespace {

namespace fs = std::filesystem;

nlohmann::json case_to_json(const Case& c) {
  nlohmann::json j;
  j["case_id"] = c.case_id;
  j["expert_id"] = c.expert_id;
  j["labels"] = c.labels.values();
  nlohmann::json instances = nlohmann::json::array();
  for (int i = 0; i < c.bag.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < c.bag.dim(); ++k) row.push_back(c.bag.instances()(i, k));
    instances.push_back(std::move(row));
  }
  j["instances"] = std::move(instances);
  return j;
}

Case case_from_json(const nlohmann::json& j, const std::string& where) {
  Case c;
  try {
    c.case_id = j.at("case_id").get<std::string>();
    c.expert_id = j.at("expert_id").get<std::string>();
    c.labels = LabelSet(j.at("labels").get<std::vector<int>>());
    const auto& instances = j.at("instances");
    const Eigen::Index rows = static_cast<Eigen::Index>(instances.size());
    const Eigen::Index cols =
        rows > 0 ? static_cast<Eigen::Index>(instances.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = instances.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != cols)
        throw DataError(where + ": case '" + c.case_id + "' has ragged instances");
      for (Eigen::Index k = 0; k < cols; ++k)
        m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    c.bag = Bag{std::move(m)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  return c;
}

}  // namespace

MIMLDataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  const fs::path manifest_path = root / "manifest.json";
  const fs::path cases_path = root / "cases.jsonl";

  std::ifstream mf(manifest_path);
  if (!mf) throw DataError(manifest_path.string() + ": cannot open");
  nlohmann::json mj;
  try {
    mf >> mj;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": malformed JSON: " + e.what());
  }

  MIMLDataset d;
  try {
    d.manifest.format_version = mj.at("format_version").get<int>();
    d.manifest.dim = mj.at("dim").get<int>();
    d.manifest.label_names = mj.at("label_names").get<std::vector<std::string>>();
    d.manifest.provenance = mj.value("provenance", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  if (d.manifest.format_version != 1)
    throw DataError(manifest_path.string() + ": unsupported format_version " +
                    std::to_string(d.manifest.format_version));
  if (d.manifest.dim < 1) throw DataError(manifest_path.string() + ": dim must be >= 1");
  if (d.manifest.label_names.empty())
    throw DataError(manifest_path.string() + ": label_names must be non-empty");

  std::ifstream cf(cases_path);
  if (!cf) throw DataError(cases_path.string() + ": cannot open");
  std::string line;
  int line_no = 0;
  while (std::getline(cf, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json cj;
    try {
      cj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(cases_path.string() + ":" + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    d.cases.push_back(
        case_from_json(cj, cases_path.string() + ":" + std::to_string(line_no)));
  }

  const auto violations = validate_dataset(d);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << dir << ": dataset fails validation (" << violations.size() << " violation";
    if (violations.size() > 1) msg << "s";
    msg << "; first: case '" << violations.front().case_id << "' "
        << violations.front().rule << ": " << violations.front().detail << ")";
    throw DataError(msg.str());
  }
  return d;
}

void save_dataset(const MIMLDataset& d, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);

  nlohmann::json mj;
  mj["format_version"] = d.manifest.format_version;
  mj["dim"] = d.manifest.dim;
  mj["label_names"] = d.manifest.label_names;
  mj["provenance"] = d.manifest.provenance;

  std::ofstream mf(root / "manifest.json", std::ios::binary);
  if (!mf) throw DataError((root / "manifest.json").string() + ": cannot open for writing");
  mf << mj.dump(2) << "\n";

  std::ofstream cf(root / "cases.jsonl", std::ios::binary);
  if (!cf) throw DataError((root / "cases.jsonl").string() + ": cannot open for writing");
  for (const Case& c : d.cases) cf << case_to_json(c).dump() << "\n";
  if (!cf) throw DataError((root / "cases.jsonl").string() + ": write failed");
}

std::uint64_t dataset_fingerprint(const MIMLDataset& d) {
  std::ostringstream buf;
  buf << d.manifest.format_version << '\x1f' << d.manifest.dim << '\x1f'
      << d.manifest.provenance << '\x1f';
  for (const auto& name : d.manifest.label_names) buf << name << '\x1f';
  for (const Case& c : d.cases) buf << case_to_json(c).dump() << '\x1f';
  const std::string s = buf.str();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace miml
