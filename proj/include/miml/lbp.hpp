#pragma once

#include <array>
#include <vector>

#include "miml/image.hpp"
#include "miml/stain.hpp"
#include "miml/types.hpp"

namespace miml {

// 3x3 window in row-major order {TL, T, TR, L, C, R, BL, B, BR}. Bit k is
// set iff the corresponding neighbor is >= the center; neighbors are taken
// clockwise from the top-left, top-left as the most significant bit.
int lbp8_code(const std::array<double, 9>& window);

// 256-bin histogram of lbp8_code over all interior pixels, L1-normalized.
// Requires at least a 3x3 image.
FeatureVector lbp8_histogram(const GrayImage& img);

// Full per-ROI pipeline: RGB -> optical density -> stain separation ->
// hematoxylin channel -> LBP histogram. One 256-dim instance per ROI.
Bag extract_case_features(const std::vector<RgbImage>& roi_images, const StainMatrix& stains);
Bag extract_case_features(const std::vector<RgbImage>& roi_images);

}  // namespace miml
