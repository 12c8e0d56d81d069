#pragma once

#include <array>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "miml/image.hpp"
#include "miml/types.hpp"

namespace miml {

// Optical-density stain basis: one unit-norm column per stain
// (hematoxylin, eosin, residual) plus its inverse.
class StainMatrix {
 public:
  StainMatrix(const Eigen::Vector3d& hematoxylin, const Eigen::Vector3d& eosin,
              const Eigen::Vector3d& residual);

  // The published H&E optical-density vectors, residual completing the basis.
  static StainMatrix ruifrok_he();

  static StainMatrix from_json(const nlohmann::json& j);
  static StainMatrix load(const std::string& path);
  nlohmann::json to_json() const;

  const Eigen::Matrix3d& matrix() const { return m_; }
  const Eigen::Matrix3d& inverse() const { return inv_; }

 private:
  Eigen::Matrix3d m_;    // columns = stains, each unit L2 norm
  Eigen::Matrix3d inv_;
};

// Per-pixel optical density, one column per pixel in row-major pixel order.
struct OdImage {
  int width = 0;
  int height = 0;
  Eigen::Matrix3Xd od;
};

// OD = -log10((I + 1) / 256) per channel; the +1 keeps black pixels finite.
OdImage rgb_to_od(const RgbImage& img);

// Per-pixel concentrations inverse(m) * od, clamped at zero. Index 0 is the
// hematoxylin (nuclei) channel.
std::array<GrayImage, 3> separate_stains(const OdImage& od, const StainMatrix& m);

}  // namespace miml
