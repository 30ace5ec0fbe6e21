#include "anigreen/obj_io.hpp"

#include "anigreen/error.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace anigreen {

namespace {

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path);
}

ObjMesh parse_obj(const std::string& text, const std::string& origin) {
  ObjMesh mesh;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec<3> p;
      if (!(ls >> p.x() >> p.y() >> p.z())) fail("vertex needs three coordinates");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) {
        int idx = 0;
        const char* b = tok.data();
        auto r = std::from_chars(b, b + tok.size(), idx);
        if (r.ec != std::errc()) fail("bad face index '" + tok + "'");
        if (idx < 0) idx = int(mesh.vertices.size()) + idx + 1;
        if (idx < 1 || idx > int(mesh.vertices.size())) fail("face index out of range");
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) fail("face needs at least three vertices");
      if (poly.size() > 3) ++mesh.fanned_polygons;
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return mesh;
}

ObjMesh read_obj(const std::string& path) {
  ObjMesh mesh = parse_obj(read_text_file(path), path);
  if (mesh.fanned_polygons > 0)
    std::cerr << "warning: " << path << ": fan-triangulated " << mesh.fanned_polygons << " polygon(s)\n";
  return mesh;
}

std::string format_obj(const PointList<3>& vertices, const std::vector<std::vector<int>>& faces) {
  std::string out;
  for (const auto& v : vertices) out += "v " + shortest(v.x()) + " " + shortest(v.y()) + " " + shortest(v.z()) + "\n";
  for (const auto& f : faces) {
    if (f.size() < 2) continue;
    out += f.size() == 2 ? "l" : "f";
    for (int i : f) out += " " + std::to_string(i + 1);
    out += "\n";
  }
  return out;
}

}  // namespace anigreen
