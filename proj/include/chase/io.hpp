#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace chase {

// Writes `content` to `<path>.tmp` and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Shortest round-trip decimal text for CSV output; "nan"/"inf" spelled out.
std::string fmt_num(double v);

}  // namespace chase
