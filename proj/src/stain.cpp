#include "miml/stain.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace miml {

namespace {

Eigen::Vector3d normalized_stain(const Eigen::Vector3d& v, const char* name) {
  const double n = v.norm();
  if (!(n > 1e-12)) throw std::invalid_argument(std::string("StainMatrix: zero ") + name + " vector");
  return v / n;
}

Eigen::Vector3d json_vec3(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 3)
    throw std::invalid_argument(std::string("stain config: missing 3-vector '") + key + "'");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = j.at(key).at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

StainMatrix::StainMatrix(const Eigen::Vector3d& hematoxylin, const Eigen::Vector3d& eosin,
                         const Eigen::Vector3d& residual) {
  m_.col(0) = normalized_stain(hematoxylin, "hematoxylin");
  m_.col(1) = normalized_stain(eosin, "eosin");
  m_.col(2) = normalized_stain(residual, "residual");
  const double det = m_.determinant();
  if (std::abs(det) < 1e-8)
    throw std::invalid_argument("StainMatrix: stain vectors are not independent");
  inv_ = m_.inverse();
}

StainMatrix StainMatrix::ruifrok_he() {
  return StainMatrix(Eigen::Vector3d(0.65, 0.70, 0.29), Eigen::Vector3d(0.07, 0.99, 0.11),
                     Eigen::Vector3d(0.27, 0.57, 0.78));
}

StainMatrix StainMatrix::from_json(const nlohmann::json& j) {
  return StainMatrix(json_vec3(j, "hematoxylin"), json_vec3(j, "eosin"),
                     json_vec3(j, "residual"));
}

StainMatrix StainMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open stain config");
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

nlohmann::json StainMatrix::to_json() const {
  nlohmann::json j;
  const char* keys[3] = {"hematoxylin", "eosin", "residual"};
  for (int c = 0; c < 3; ++c)
    j[keys[c]] = {m_(0, c), m_(1, c), m_(2, c)};
  return j;
}

OdImage rgb_to_od(const RgbImage& img) {
  OdImage out;
  out.width = img.width;
  out.height = img.height;
  const Eigen::Index n = static_cast<Eigen::Index>(img.width) * img.height;
  out.od.resize(3, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (int c = 0; c < 3; ++c) {
      const double intensity = img.pixels[static_cast<std::size_t>(3 * p + c)];
      out.od(c, p) = -std::log10((intensity + 1.0) / 256.0);
    }
  return out;
}

std::array<GrayImage, 3> separate_stains(const OdImage& od, const StainMatrix& m) {
  const Eigen::Matrix3Xd conc = m.inverse() * od.od;
  std::array<GrayImage, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[static_cast<std::size_t>(c)].width = od.width;
    out[static_cast<std::size_t>(c)].height = od.height;
    out[static_cast<std::size_t>(c)].values.resize(
        static_cast<std::size_t>(od.width) * static_cast<std::size_t>(od.height));
  }
  for (Eigen::Index p = 0; p < conc.cols(); ++p)
    for (int c = 0; c < 3; ++c)
      out[static_cast<std::size_t>(c)].values[static_cast<std::size_t>(p)] =
          std::max(0.0, conc(c, p));
  return out;
}

}  // namespace miml
