#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "miml/image.hpp"
#include "miml/lbp.hpp"
#include "miml/rng.hpp"
#include "miml/stain.hpp"
#include "support/test_util.hpp"

using namespace miml;

namespace {

RgbImage constant_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(3 * w * h));
  for (int p = 0; p < w * h; ++p) {
    img.pixels[static_cast<std::size_t>(3 * p)] = r;
    img.pixels[static_cast<std::size_t>(3 * p + 1)] = g;
    img.pixels[static_cast<std::size_t>(3 * p + 2)] = b;
  }
  return img;
}

RgbImage random_image(Rng& rng, int w, int h) {
  RgbImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(3 * w * h));
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng.uniform_int(256));
  return img;
}

GrayImage gray_from(std::initializer_list<std::initializer_list<double>> rows) {
  GrayImage g;
  g.height = static_cast<int>(rows.size());
  g.width = static_cast<int>(rows.begin()->size());
  for (const auto& row : rows)
    for (double v : row) g.values.push_back(v);
  return g;
}

}  // namespace

TEST_CASE("rgb_to_od matches the guarded log formula") {
  const RgbImage white = constant_image(2, 2, 255, 255, 255);
  const OdImage od_white = rgb_to_od(white);
  CHECK(od_white.od.cwiseAbs().maxCoeff() < 1e-3);

  RgbImage px = constant_image(1, 1, 25, 0, 255);
  const OdImage od = rgb_to_od(px);
  CHECK(od.od(0, 0) == doctest::Approx(0.9932666173).epsilon(1e-9));
  CHECK(od.od(1, 0) == doctest::Approx(2.4082399653).epsilon(1e-9));  // finite at I=0
  CHECK(od.od(2, 0) == doctest::Approx(0.0));

  // monotone decreasing in intensity
  double prev = 10.0;
  for (int i : {0, 10, 100, 200, 255}) {
    const OdImage o = rgb_to_od(constant_image(1, 1, static_cast<std::uint8_t>(i), 0, 0));
    CHECK(o.od(0, 0) < prev);
    prev = o.od(0, 0);
  }
}

TEST_CASE("StainMatrix normalizes columns and rejects dependent stains") {
  const StainMatrix he = StainMatrix::ruifrok_he();
  for (int c = 0; c < 3; ++c) CHECK(he.matrix().col(c).norm() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK((he.matrix() * he.inverse() - Eigen::Matrix3d::Identity()).norm() < 1e-12);

  CHECK_THROWS_AS(StainMatrix(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 0, 0),
                              Eigen::Vector3d(0, 0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(StainMatrix(Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 1, 0),
                              Eigen::Vector3d(0, 0, 1)),
                  std::invalid_argument);
}

TEST_CASE("separate_stains inverts the stain mixing") {
  const StainMatrix he = StainMatrix::ruifrok_he();

  // OD equal to the hematoxylin vector -> concentration (1, 0, 0)
  OdImage od;
  od.width = 1;
  od.height = 1;
  od.od = he.matrix().col(0);
  const auto maps = separate_stains(od, he);
  CHECK(maps[0].values[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(maps[1].values[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(maps[2].values[0] == doctest::Approx(0.0).epsilon(1e-9));

  // zero OD -> zero concentrations
  od.od = Eigen::Vector3d::Zero();
  const auto zero_maps = separate_stains(od, he);
  for (const auto& m : zero_maps) CHECK(m.values[0] == doctest::Approx(0.0));

  // round trip c -> od = M c -> concentrations == c for nonnegative c
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector3d c(rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0));
    od.od = he.matrix() * c;
    const auto rt = separate_stains(od, he);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(rt[static_cast<std::size_t>(k)].values[0] - c(k)) < 1e-9);
  }
}

TEST_CASE("lbp8_code conventions") {
  // all equal: every neighbor >= center
  CHECK(lbp8_code({5, 5, 5, 5, 5, 5, 5, 5, 5}) == 255);
  // all below center
  CHECK(lbp8_code({0, 0, 0, 0, 5, 0, 0, 0, 0}) == 0);
  // only T and R set: clockwise from TL gives bits 01010000
  CHECK(lbp8_code({0, 9, 0, 0, 5, 9, 0, 0, 0}) == 80);
  // single MSB: top-left only
  CHECK(lbp8_code({9, 0, 0, 0, 5, 0, 0, 0, 0}) == 128);
  // single LSB: left only
  CHECK(lbp8_code({0, 0, 0, 9, 5, 0, 0, 0, 0}) == 1);
}

TEST_CASE("lbp8_histogram on tiny images") {
  // constant image: one-hot at bin 255
  GrayImage flat;
  flat.width = 5;
  flat.height = 4;
  flat.values.assign(20, 3.25);
  const FeatureVector hist = lbp8_histogram(flat);
  CHECK(hist.size() == 256);
  CHECK(hist(255) == doctest::Approx(1.0));
  CHECK(hist.sum() == doctest::Approx(1.0).epsilon(1e-9));

  // 3x3: exactly one interior pixel, all mass in one bin
  const GrayImage tiny = gray_from({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const FeatureVector tiny_hist = lbp8_histogram(tiny);
  CHECK(tiny_hist.sum() == doctest::Approx(1.0));
  CHECK((tiny_hist.array() == 1.0).count() == 1);
  // window around center 5: neighbors TL=1 T=2 TR=3 R=6 BR=9 B=8 BL=7 L=4
  // bits: 0,0,0,1,1,1,1,0 -> 0b00011110 = 30
  CHECK(tiny_hist(30) == doctest::Approx(1.0));

  GrayImage too_small;
  too_small.width = 2;
  too_small.height = 3;
  too_small.values.assign(6, 0.0);
  CHECK_THROWS_AS(lbp8_histogram(too_small), std::invalid_argument);
}

TEST_CASE("lbp8_histogram 3x4 image with two hand-computed windows") {
  // centers at (1,1)=5 and (2,1)=6
  const GrayImage img = gray_from({
      {1, 9, 2, 7},
      {3, 5, 6, 0},
      {4, 8, 1, 2},
  });
  // window at center 5: TL=1 T=9 TR=2 R=6 BR=1 B=8 BL=4 L=3
  //   bits (TL..L) = 0,1,0,1,0,1,0,0 -> 0b01010100 = 84
  // window at center 6: TL=9 T=2 TR=7 R=0 BR=2 B=1 BL=8 L=5
  //   bits = 1,0,1,0,0,0,1,0 -> 0b10100010 = 162
  const FeatureVector hist = lbp8_histogram(img);
  CHECK(hist(84) == doctest::Approx(0.5));
  CHECK(hist(162) == doctest::Approx(0.5));
  CHECK(hist.sum() == doctest::Approx(1.0));
}

TEST_CASE("lbp codes are invariant to constant gray shifts") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    GrayImage img;
    img.width = 6;
    img.height = 5;
    for (int i = 0; i < 30; ++i) img.values.push_back(rng.uniform(0.0, 10.0));
    GrayImage shifted = img;
    const double delta = rng.uniform(-100.0, 100.0);
    for (double& v : shifted.values) v += delta;
    CHECK(lbp8_histogram(img) == lbp8_histogram(shifted));
  }
}

TEST_CASE("extract_case_features builds probability-vector instances") {
  Rng rng(7);
  std::vector<RgbImage> rois;
  for (int i = 0; i < 4; ++i) rois.push_back(random_image(rng, 8, 7));
  const Bag bag = extract_case_features(rois);
  CHECK(bag.size() == 4);
  CHECK(bag.dim() == 256);
  for (int i = 0; i < bag.size(); ++i) {
    CHECK(bag.instances().row(i).minCoeff() >= 0.0);
    CHECK(bag.instances().row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }

  // constant-color ROI -> one-hot at bin 255
  const Bag flat = extract_case_features({constant_image(6, 6, 180, 90, 200)});
  CHECK(flat.instances()(0, 255) == doctest::Approx(1.0));

  // duplicate ROIs give identical instances; the pipeline is deterministic
  const RgbImage roi = random_image(rng, 9, 9);
  const Bag twice = extract_case_features({roi, roi});
  CHECK(twice.instances().row(0) == twice.instances().row(1));
  const Bag again = extract_case_features({roi, roi});
  CHECK(twice.instances() == again.instances());

  CHECK_THROWS_AS(extract_case_features({}), std::invalid_argument);
}

TEST_CASE("PPM round trip and header handling") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "miml_ppm_test";
  fs::create_directories(dir);

  Rng rng(8);
  const RgbImage img = random_image(rng, 11, 6);
  const std::string path = (dir / "img.ppm").string();
  write_ppm(img, path);
  const RgbImage back = read_ppm(path);
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.pixels == img.pixels);
  CHECK(read_image(path).pixels == img.pixels);

  // comments and whitespace in the header are fine
  {
    std::ofstream out(dir / "comment.ppm", std::ios::binary);
    out << "P6\n# a comment\n 2 1\n# another\n255\n";
    const unsigned char data[6] = {1, 2, 3, 4, 5, 6};
    out.write(reinterpret_cast<const char*>(data), 6);
  }
  const RgbImage commented = read_ppm((dir / "comment.ppm").string());
  CHECK(commented.width == 2);
  CHECK(commented.height == 1);
  CHECK(commented.pixels[3] == 4);

  // wrong magic, wrong maxval, truncated data
  {
    std::ofstream out(dir / "p3.ppm");
    out << "P3\n1 1\n255\n1 2 3\n";
  }
  CHECK_THROWS_AS(read_ppm((dir / "p3.ppm").string()), std::invalid_argument);
  {
    std::ofstream out(dir / "max16.ppm", std::ios::binary);
    out << "P6\n1 1\n65535\n";
    const unsigned char data[6] = {0, 0, 0, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(data), 6);
  }
  CHECK_THROWS_AS(read_ppm((dir / "max16.ppm").string()), std::invalid_argument);
  {
    std::ofstream out(dir / "short.ppm", std::ios::binary);
    out << "P6\n2 2\n255\n";
    const unsigned char data[5] = {1, 2, 3, 4, 5};
    out.write(reinterpret_cast<const char*>(data), 5);
  }
  CHECK_THROWS_AS(read_ppm((dir / "short.ppm").string()), std::invalid_argument);

  fs::remove_all(dir);
}

TEST_CASE("stain config JSON round trip matches the built-in default") {
  const StainMatrix he = StainMatrix::ruifrok_he();
  const StainMatrix parsed = StainMatrix::from_json(he.to_json());
  CHECK((parsed.matrix() - he.matrix()).norm() < 1e-12);

  nlohmann::json bad;
  bad["hematoxylin"] = {1.0, 0.0};
  CHECK_THROWS_AS(StainMatrix::from_json(bad), std::invalid_argument);
}
