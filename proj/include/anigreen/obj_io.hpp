#pragma once

#include "anigreen/types.hpp"

#include <string>
#include <vector>

namespace anigreen {

struct ObjMesh {
  PointList<3> vertices;
  std::vector<std::array<int, 3>> triangles;
  // Polygons with more than three corners that were fan-triangulated.
  std::size_t fanned_polygons = 0;
};

/// Reads v and f records; other records are ignored. Negative (relative)
/// indices are resolved. Throws ParseError with the line number.
ObjMesh read_obj(const std::string& path);
ObjMesh parse_obj(const std::string& text, const std::string& origin = "<obj>");

/// Shortest round-trip number formatting, so identical inputs give
/// byte-identical files.
std::string format_obj(const PointList<3>& vertices, const std::vector<std::vector<int>>& faces);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace anigreen
