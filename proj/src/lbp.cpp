#include "miml/lbp.hpp"

#include <stdexcept>

namespace miml {

int lbp8_code(const std::array<double, 9>& window) {
  const double center = window[4];
  // Clockwise from top-left: TL T TR R BR B BL L, TL most significant.
  const std::array<int, 8> neighbor_index = {0, 1, 2, 5, 8, 7, 6, 3};
  int code = 0;
  for (int bit = 0; bit < 8; ++bit) {
    code <<= 1;
    if (window[static_cast<std::size_t>(neighbor_index[static_cast<std::size_t>(bit)])] >= center)
      code |= 1;
  }
  return code;
}

FeatureVector lbp8_histogram(const GrayImage& img) {
  if (img.width < 3 || img.height < 3)
    throw std::invalid_argument("lbp8_histogram: image must be at least 3x3");
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(256);
  for (int y = 1; y < img.height - 1; ++y)
    for (int x = 1; x < img.width - 1; ++x) {
      const std::array<double, 9> window = {
          img.at(x - 1, y - 1), img.at(x, y - 1), img.at(x + 1, y - 1),
          img.at(x - 1, y),     img.at(x, y),     img.at(x + 1, y),
          img.at(x - 1, y + 1), img.at(x, y + 1), img.at(x + 1, y + 1),
      };
      hist(lbp8_code(window)) += 1.0;
    }
  return hist / hist.sum();
}

Bag extract_case_features(const std::vector<RgbImage>& roi_images, const StainMatrix& stains) {
  if (roi_images.empty())
    throw std::invalid_argument("extract_case_features: a case needs at least one ROI");
  Eigen::MatrixXd instances(static_cast<Eigen::Index>(roi_images.size()), 256);
  for (std::size_t i = 0; i < roi_images.size(); ++i) {
    const OdImage od = rgb_to_od(roi_images[i]);
    const auto channels = separate_stains(od, stains);
    instances.row(static_cast<Eigen::Index>(i)) =
        lbp8_histogram(channels[0]).transpose();  // hematoxylin carries the nuclei
  }
  return Bag{std::move(instances)};
}

Bag extract_case_features(const std::vector<RgbImage>& roi_images) {
  return extract_case_features(roi_images, StainMatrix::ruifrok_he());
}

}  // namespace miml
