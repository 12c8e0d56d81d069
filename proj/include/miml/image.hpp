#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace miml {

// 8-bit RGB, row-major, three bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  std::uint8_t channel(int x, int y, int c) const {
    return pixels[static_cast<std::size_t>(3 * (y * width + x) + c)];
  }
};

// Real-valued single channel, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // width * height

  double at(int x, int y) const { return values[static_cast<std::size_t>(y * width + x)]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y * width + x)]; }
};

// Binary PPM (P6, maxval 255). Comments and arbitrary header whitespace are
// accepted; anything else is an error.
RgbImage read_ppm(const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);

// Dispatches on file content; currently only P6 PPM is supported.
RgbImage read_image(const std::string& path);

}  // namespace miml
