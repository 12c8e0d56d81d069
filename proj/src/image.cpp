#include "miml/image.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace miml {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) continue;
    break;
  }
  if (ch == EOF) return tok;
  tok.push_back(static_cast<char>(ch));
  while ((ch = in.get()) != EOF && !std::isspace(ch) && ch != '#') tok.push_back(static_cast<char>(ch));
  if (ch == '#') in.unget();
  return tok;
}

int parse_positive(const std::string& tok, const std::string& path, const char* what) {
  try {
    const int v = std::stoi(tok);
    if (v <= 0) throw std::invalid_argument("non-positive");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(path + ": bad PPM " + what + " '" + tok + "'");
  }
}

}  // namespace

RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open");
  const std::string magic = next_token(in);
  if (magic != "P6")
    throw std::invalid_argument(path + ": not a binary PPM (magic '" + magic + "')");
  RgbImage img;
  img.width = parse_positive(next_token(in), path, "width");
  img.height = parse_positive(next_token(in), path, "height");
  const int maxval = parse_positive(next_token(in), path, "maxval");
  if (maxval != 255) throw std::invalid_argument(path + ": only maxval 255 is supported");
  // The header ends with exactly one whitespace byte, already consumed by
  // next_token's terminating read.
  const std::size_t n = static_cast<std::size_t>(3 * img.width * img.height);
  img.pixels.resize(n);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw std::invalid_argument(path + ": truncated pixel data");
  return img;
}

void write_ppm(const RgbImage& img, const std::string& path) {
  if (img.pixels.size() != static_cast<std::size_t>(3 * img.width * img.height))
    throw std::invalid_argument("write_ppm: pixel buffer does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument(path + ": cannot open for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::invalid_argument(path + ": write failed");
}

RgbImage read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  in.close();
  if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
  throw std::invalid_argument(path + ": unsupported image format (expected P6 PPM)");
}

}  // namespace miml
