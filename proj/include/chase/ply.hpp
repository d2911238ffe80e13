#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "chase/geom.hpp"

namespace chase {

// ASCII PLY 1.0 subset: a single `vertex` element with float x/y/z and
// uchar red/green/blue properties. Extra vertex properties are ignored;
// other elements, binary formats and list properties are rejected.
//
// Positions are parsed as 32-bit floats, so a cloud written by write_ply
// reloads to exactly the same values.
RgbPointCloud read_ply(std::istream& in);
RgbPointCloud load_ply(const std::filesystem::path& path);

// Canonical writer: shortest round-trip float text for positions.
void write_ply(std::ostream& out, const RgbPointCloud& cloud);
void save_ply(const std::filesystem::path& path, const RgbPointCloud& cloud);

}  // namespace chase
