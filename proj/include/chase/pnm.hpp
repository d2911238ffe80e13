#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chase/render.hpp"

namespace chase {

// Binary P6 encoding of the colour channel.
std::string encode_ppm(const LabeledImage& image);
// Binary P5 encoding of an 8-bit gray buffer (row-major, width*height bytes).
std::string encode_pgm(int width, int height, const std::vector<std::uint8_t>& gray);

// ACTOR=255, BACKGROUND=128, EMPTY=0.
std::vector<std::uint8_t> label_map(const LabeledImage& image);

void save_ppm(const std::filesystem::path& path, const LabeledImage& image);
void save_pgm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& gray);

}  // namespace chase
