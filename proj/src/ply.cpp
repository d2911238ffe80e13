#include "chase/ply.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "chase/error.hpp"
#include "chase/io.hpp"

namespace chase {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_float_type(std::string_view t) { return t == "float" || t == "float32"; }
bool is_uchar_type(std::string_view t) { return t == "uchar" || t == "uint8"; }
bool is_scalar_type(std::string_view t) {
  static constexpr std::array<std::string_view, 16> kTypes = {
      "char", "uchar", "short", "ushort", "int", "uint", "float", "double",
      "int8", "uint8", "int16", "uint16", "int32", "uint32", "float32", "float64"};
  for (auto k : kTypes)
    if (t == k) return true;
  return false;
}

struct Property {
  std::string name;
  std::string type;
};

}  // namespace

RgbPointCloud read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError("expected 'ply' magic", line_no == 0 ? 1 : line_no);

  bool have_format = false;
  std::optional<std::size_t> vertex_count;
  bool in_vertex = false;
  std::vector<Property> props;
  bool header_done = false;

  while (next_line()) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii" || tok[2] != "1.0") {
        throw ParseError("unsupported format (only 'format ascii 1.0')", line_no);
      }
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element line", line_no);
      if (tok[1] != "vertex") throw ParseError("unsupported element '" + std::string(tok[1]) + "'", line_no);
      if (vertex_count) throw ParseError("duplicate vertex element", line_no);
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), n);
      if (ec != std::errc() || ptr != tok[2].data() + tok[2].size()) {
        throw ParseError("invalid vertex count", line_no);
      }
      vertex_count = n;
      in_vertex = true;
    } else if (tok[0] == "property") {
      if (!in_vertex) throw ParseError("property outside vertex element", line_no);
      if (tok.size() != 3 || !is_scalar_type(tok[1])) {
        throw ParseError("unsupported property declaration", line_no);
      }
      props.push_back({std::string(tok[2]), std::string(tok[1])});
    } else if (tok[0] == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError("unknown header keyword '" + std::string(tok[0]) + "'", line_no);
    }
  }
  if (!header_done) throw ParseError("missing end_header", line_no);
  if (!have_format) throw ParseError("missing format line", line_no);
  if (!vertex_count) throw ParseError("missing 'element vertex' declaration", line_no);

  // Column of each required property.
  static constexpr std::array<std::string_view, 6> kRequired = {"x", "y", "z", "red", "green", "blue"};
  std::array<std::size_t, 6> column{};
  for (std::size_t r = 0; r < kRequired.size(); ++r) {
    std::optional<std::size_t> found;
    for (std::size_t c = 0; c < props.size(); ++c) {
      if (props[c].name == kRequired[r]) found = c;
    }
    if (!found) throw ParseError("missing vertex property '" + std::string(kRequired[r]) + "'", line_no);
    const bool ok = r < 3 ? is_float_type(props[*found].type) : is_uchar_type(props[*found].type);
    if (!ok) {
      throw ParseError("property '" + std::string(kRequired[r]) + "' has unsupported type '" +
                           props[*found].type + "'",
                       line_no);
    }
    column[r] = *found;
  }

  RgbPointCloud cloud;
  cloud.points.reserve(*vertex_count);
  for (std::size_t v = 0; v < *vertex_count; ++v) {
    if (!next_line()) throw ParseError("unexpected end of file in vertex data", line_no + 1);
    const auto tok = split_ws(line);
    if (tok.size() != props.size()) {
      throw ParseError("expected " + std::to_string(props.size()) + " values, got " + std::to_string(tok.size()),
                       line_no);
    }
    ColoredPoint p;
    for (int a = 0; a < 3; ++a) {
      const auto s = tok[column[a]];
      float f = 0.0f;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(f)) {
        throw ParseError("invalid coordinate '" + std::string(s) + "'", line_no);
      }
      p.position[a] = f;
    }
    std::array<std::uint8_t, 3> rgb{};
    for (int a = 0; a < 3; ++a) {
      const auto s = tok[column[3 + a]];
      unsigned value = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size() || value > 255) {
        throw ParseError("invalid color channel '" + std::string(s) + "'", line_no);
      }
      rgb[a] = static_cast<std::uint8_t>(value);
    }
    p.color = {rgb[0], rgb[1], rgb[2]};
    cloud.points.push_back(p);
  }
  return cloud;
}

RgbPointCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return read_ply(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_ply(std::ostream& out, const RgbPointCloud& cloud) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  std::array<char, 32> buf{};
  for (const auto& p : cloud.points) {
    for (int a = 0; a < 3; ++a) {
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(p.position[a]));
      out.write(buf.data(), ptr - buf.data());
      out.put(' ');
    }
    out << unsigned(p.color.r) << ' ' << unsigned(p.color.g) << ' ' << unsigned(p.color.b) << '\n';
  }
}

void save_ply(const std::filesystem::path& path, const RgbPointCloud& cloud) {
  std::ostringstream os;
  write_ply(os, cloud);
  write_file_atomic(path, os.str());
}

}  // namespace chase
