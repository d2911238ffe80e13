#include "chase/pnm.hpp"

#include <stdexcept>

#include "chase/io.hpp"

namespace chase {

std::string encode_ppm(const LabeledImage& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.pixel_count() * 3);
  for (const auto& c : image.colors()) {
    out.push_back(static_cast<char>(c.r));
    out.push_back(static_cast<char>(c.g));
    out.push_back(static_cast<char>(c.b));
  }
  return out;
}

std::string encode_pgm(int width, int height, const std::vector<std::uint8_t>& gray) {
  if (width < 1 || height < 1 || gray.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("gray buffer does not match image size");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(gray.begin(), gray.end());
  return out;
}

std::vector<std::uint8_t> label_map(const LabeledImage& image) {
  std::vector<std::uint8_t> out;
  out.reserve(image.pixel_count());
  for (auto l : image.labels()) {
    switch (l) {
      case PixelLabel::kActor: out.push_back(255); break;
      case PixelLabel::kBackground: out.push_back(128); break;
      case PixelLabel::kEmpty: out.push_back(0); break;
    }
  }
  return out;
}

void save_ppm(const std::filesystem::path& path, const LabeledImage& image) {
  write_file_atomic(path, encode_ppm(image));
}

void save_pgm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& gray) {
  write_file_atomic(path, encode_pgm(width, height, gray));
}

}  // namespace chase
