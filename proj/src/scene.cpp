#include "anigreen/scene.hpp"

#include "anigreen/error.hpp"
#include "anigreen/obj_io.hpp"

#include <cmath>
#include <filesystem>
#include <regex>

namespace anigreen {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<int>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != std::size_t(N)) field_error(field, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int k = 0; k < N; ++k) v(k) = number(j[k], field + "[" + std::to_string(k) + "]");
  return v;
}

// Re-raise validator errors with the field they came from.
template <typename F>
auto with_context(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(e.code(), field + ": " + e.what(), e.indices());
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).string();
}

template <int D>
std::vector<Face<D>> faces_from(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array");
  std::vector<Face<D>> faces;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != std::size_t(D)) field_error(f, "expected " + std::to_string(D) + " indices");
    Face<D> face;
    for (int k = 0; k < D; ++k) face[k] = integer(j[i][k], f);
    faces.push_back(face);
  }
  return faces;
}

template <int D>
Cage<D> cage_from(const json& j, const std::string& field, const std::string& base) {
  PointList<D> verts;
  std::vector<Face<D>> faces;
  if constexpr (D == 3) {
    if (j.contains("obj")) {
      auto mesh = read_obj(resolve(base, j["obj"].get<std::string>()));
      verts = mesh.vertices;
      for (const auto& t : mesh.triangles) faces.push_back(t);
    }
  }
  if (verts.empty()) {
    verts = points_from_json<D>(require(j, "vertices", field), field + ".vertices");
    if (j.contains("faces")) faces = faces_from<D>(j["faces"], field + ".faces");
    if constexpr (D == 3)
      if (!j.contains("faces")) field_error(field + ".faces", "missing");
  }
  return with_context(field, [&] { return Cage<D>::validate(std::move(verts), std::move(faces)); });
}

template <int D>
SceneData<D> scene_from(const json& j, const std::string& base) {
  Cage<D> source = cage_from<D>(require(j, "source_cage", ""), "source_cage", base);
  std::optional<PointList<D>> target;
  if (j.contains("target_cage")) {
    const json& t = j["target_cage"];
    PointList<D> tv;
    if constexpr (D == 3) {
      if (t.contains("obj")) tv = read_obj(resolve(base, t["obj"].get<std::string>())).vertices;
    }
    if (tv.empty()) tv = points_from_json<D>(require(t, "vertices", "target_cage"), "target_cage.vertices");
    with_context("target_cage", [&] { return make_cage_pair(source, tv); });
    target = std::move(tv);
  }

  MatrixSpec<D> spec = j.contains("matrix") ? matrix_spec_from_json<D>(j["matrix"]) : MatrixSpec<D>::identity();
  SpdMatrix<D> matrix = with_context("matrix", [&] { return build_matrix(spec); });

  SceneData<D> s{std::move(source), std::move(target), spec, matrix, {}, {}, {}, -1.0, false, true, 0, {}};
  if (j.contains("interior_eps")) {
    s.interior_eps = number(j["interior_eps"], "interior_eps");
    if (s.interior_eps < 0) field_error("interior_eps", "must be non-negative");
  }
  if (j.contains("clamp_inward")) s.clamp_inward = j["clamp_inward"].get<bool>();
  if (j.contains("use_scale")) {
    if (!j["use_scale"].is_boolean()) field_error("use_scale", "expected a boolean");
    s.use_scale = j["use_scale"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) field_error("seed", "expected an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("object")) {
    const json& o = j["object"];
    if (o.contains("grid")) {
      if constexpr (D != 2) {
        field_error("object.grid", "grid objects are 2D only");
      } else {
        const json& g = o["grid"];
        GridSpec grid;
        grid.nx = integer(require(g, "nx", "object.grid"), "object.grid.nx");
        grid.ny = integer(require(g, "ny", "object.grid"), "object.grid.ny");
        if (grid.nx < 2 || grid.ny < 2) field_error("object.grid", "nx and ny must be at least 2");
        auto bb = vec_from<4>(require(g, "bbox", "object.grid"), "object.grid.bbox");
        grid.lo = Vec<2>(bb(0), bb(1));
        grid.hi = Vec<2>(bb(2), bb(3));
        double eps = s.policy().resolve(s.source.bbox_diagonal());
        for (int iy = 0; iy < grid.ny; ++iy)
          for (int ix = 0; ix < grid.nx; ++ix) {
            Vec<2> p(grid.lo.x() + (grid.hi.x() - grid.lo.x()) * ix / (grid.nx - 1),
                     grid.lo.y() + (grid.hi.y() - grid.lo.y()) * iy / (grid.ny - 1));
            if (is_interior(s.source, p, eps)) s.object_vertices.push_back(p);
          }
        s.grid = grid;
      }
    } else if (o.contains("mesh")) {
      auto mesh = read_obj(resolve(base, o["mesh"].get<std::string>()));
      for (const auto& v : mesh.vertices) {
        Vec<D> p;
        for (int k = 0; k < D; ++k) p(k) = v(k);
        s.object_vertices.push_back(p);
      }
      for (const auto& t : mesh.triangles) s.object_faces.push_back({t[0], t[1], t[2]});
    } else {
      s.object_vertices = points_from_json<D>(require(o, "vertices", "object"), "object.vertices");
      if (o.contains("faces")) {
        const json& f = o["faces"];
        if (!f.is_array()) field_error("object.faces", "expected an array");
        for (std::size_t i = 0; i < f.size(); ++i) {
          std::vector<int> face;
          for (const auto& idx : f[i]) {
            int v = integer(idx, "object.faces");
            if (v < 0 || v >= int(s.object_vertices.size())) field_error("object.faces", "index out of range");
            face.push_back(v);
          }
          s.object_faces.push_back(std::move(face));
        }
      }
    }
  }

  if (j.contains("variational")) {
    const json& v = j["variational"];
    VariationalConfig<D> cfg;
    if (v.contains("constraints")) {
      const json& cs = v["constraints"];
      if (!cs.is_array()) field_error("variational.constraints", "expected an array");
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string f = "variational.constraints[" + std::to_string(i) + "]";
        cfg.constraints.push_back({vec_from<D>(require(cs[i], "source", f), f + ".source"),
                                   vec_from<D>(require(cs[i], "target", f), f + ".target")});
      }
    }
    if (v.contains("arap_points")) cfg.arap_points = points_from_json<D>(v["arap_points"], "variational.arap_points");
    if (v.contains("hessian_sampling")) {
      const json& h = v["hessian_sampling"];
      if (h.contains("per_face")) cfg.hessian_per_face = integer(h["per_face"], "variational.hessian_sampling.per_face");
      if (h.contains("offset")) cfg.hessian_offset = number(h["offset"], "variational.hessian_sampling.offset");
    }
    if (v.contains("lambdas")) {
      auto l = vec_from<3>(v["lambdas"], "variational.lambdas");
      if ((l.array() < 0).any()) field_error("variational.lambdas", "weights must be non-negative");
      cfg.weights = {l(0), l(1), l(2)};
    }
    if (v.contains("solver")) {
      const json& so = v["solver"];
      if (so.contains("max_iters")) cfg.solver.max_iters = integer(so["max_iters"], "variational.solver.max_iters");
      if (so.contains("rel_tol")) cfg.solver.rel_tol = number(so["rel_tol"], "variational.solver.rel_tol");
      if (so.contains("lambda3_floor"))
        cfg.solver.lambda3_floor = number(so["lambda3_floor"], "variational.solver.lambda3_floor");
      if (so.contains("enforce_lambda3_floor")) cfg.solver.enforce_lambda3_floor = so["enforce_lambda3_floor"].get<bool>();
    }
    s.variational = std::move(cfg);
  }
  return s;
}

template <int D>
json scene_data_to_json(const SceneData<D>& s) {
  json j;
  j["dim"] = D;
  json src;
  src["vertices"] = points_to_json<D>(s.source.vertices());
  if constexpr (D == 3) {
    json faces = json::array();
    for (const auto& f : s.source.faces()) faces.push_back({f[0], f[1], f[2]});
    src["faces"] = faces;
  }
  j["source_cage"] = src;
  if (s.target) j["target_cage"] = {{"vertices", points_to_json<D>(*s.target)}};
  j["matrix"] = matrix_spec_to_json<D>(s.matrix_spec);
  if (s.grid) {
    j["object"] = {{"grid",
                    {{"nx", s.grid->nx},
                     {"ny", s.grid->ny},
                     {"bbox", {s.grid->lo.x(), s.grid->lo.y(), s.grid->hi.x(), s.grid->hi.y()}}}}};
  } else if (!s.object_vertices.empty()) {
    json o;
    o["vertices"] = points_to_json<D>(s.object_vertices);
    if (!s.object_faces.empty()) o["faces"] = s.object_faces;
    j["object"] = o;
  }
  if (s.interior_eps >= 0) j["interior_eps"] = s.interior_eps;
  if (s.clamp_inward) j["clamp_inward"] = true;
  j["use_scale"] = s.use_scale;
  j["seed"] = s.seed;
  if (s.variational) {
    const auto& v = *s.variational;
    json cs = json::array();
    for (const auto& c : v.constraints)
      cs.push_back({{"source", points_to_json<D>({c.source})[0]}, {"target", points_to_json<D>({c.target})[0]}});
    json vj;
    vj["constraints"] = cs;
    if (!v.arap_points.empty()) vj["arap_points"] = points_to_json<D>(v.arap_points);
    vj["hessian_sampling"] = {{"per_face", v.hessian_per_face}, {"offset", v.hessian_offset}};
    vj["lambdas"] = {v.weights.lambda1, v.weights.lambda2, v.weights.lambda3};
    vj["solver"] = {{"max_iters", v.solver.max_iters},
                    {"rel_tol", v.solver.rel_tol},
                    {"lambda3_floor", v.solver.lambda3_floor},
                    {"enforce_lambda3_floor", v.solver.enforce_lambda3_floor}};
    j["variational"] = vj;
  }
  return j;
}

}  // namespace

template <int D>
VariationalProblem<D> SceneData<D>::variational_problem() const {
  VariationalConfig<D> cfg = variational ? *variational : VariationalConfig<D>{};
  PointList<D> hess;
  if (cfg.weights.lambda2 > 0 && cfg.hessian_per_face > 0)
    hess = sample_hessian_points(source, cfg.hessian_per_face, cfg.hessian_offset, policy()).points;
  return VariationalProblem<D>{source, matrix, cfg.arap_points, cfg.constraints, hess, cfg.weights, cfg.solver, seed, 32};
}

double parse_angle(const json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) field_error(field, "expected a number or a string such as \"pi/6\"");
  const std::string text = value.get<std::string>();
  static const std::regex re(
      R"(^\s*([+-])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(\*)?\s*(pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[2].matched && !m[4].matched) || (m[3].matched && !(m[2].matched && m[4].matched)))
    field_error(field, "cannot parse angle \"" + text + "\"");
  double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[4].matched) v *= kPi;
  if (m[5].matched) {
    double den = std::stod(m[5].str());
    if (den == 0) field_error(field, "division by zero in angle");
    v /= den;
  }
  return m[1].matched && m[1].str() == "-" ? -v : v;
}

template <int D>
json matrix_spec_to_json(const MatrixSpec<D>& spec) {
  if (spec.entries) {
    json rows = json::array();
    for (int r = 0; r < D; ++r) {
      json row = json::array();
      for (int c = 0; c < D; ++c) row.push_back((*spec.entries)(r, c));
      rows.push_back(row);
    }
    return {{"entries", rows}};
  }
  json lambdas = json::array();
  for (int k = 0; k < D; ++k) lambdas.push_back(spec.lambdas(k));
  if constexpr (D == 2)
    return {{"theta", spec.angles[0]}, {"lambdas", lambdas}};
  else
    return {{"lambdas", lambdas}, {"euler", {spec.angles[0], spec.angles[1], spec.angles[2]}}};
}

template <int D>
MatrixSpec<D> matrix_spec_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected an object");
  MatrixSpec<D> spec;
  if (j.contains("entries")) {
    const json& e = j["entries"];
    if (!e.is_array() || e.size() != std::size_t(D)) field_error(field + ".entries", "expected a square matrix");
    Mat<D> m;
    for (int r = 0; r < D; ++r) m.row(r) = vec_from<D>(e[r], field + ".entries").transpose();
    spec.entries = m;
    return spec;
  }
  spec.lambdas = vec_from<D>(require(j, "lambdas", field), field + ".lambdas");
  if constexpr (D == 2) {
    if (j.contains("theta")) spec.angles[0] = parse_angle(j["theta"], field + ".theta");
  } else {
    if (j.contains("euler")) {
      const json& e = j["euler"];
      if (!e.is_array() || e.size() != 3) field_error(field + ".euler", "expected three angles");
      for (int k = 0; k < 3; ++k) spec.angles[k] = parse_angle(e[k], field + ".euler");
    }
  }
  return spec;
}

template <int D>
json points_to_json(const PointList<D>& pts) {
  json arr = json::array();
  for (const auto& p : pts) {
    json row = json::array();
    for (int k = 0; k < D; ++k) row.push_back(p(k));
    arr.push_back(row);
  }
  return arr;
}

template <int D>
PointList<D> points_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of points");
  PointList<D> pts;
  for (std::size_t i = 0; i < j.size(); ++i) pts.push_back(vec_from<D>(j[i], field + "[" + std::to_string(i) + "]"));
  return pts;
}

template <int D>
json points_to_flat_json(const PointList<D>& pts) {
  json arr = json::array();
  for (const auto& p : pts)
    for (int k = 0; k < D; ++k) arr.push_back(p(k));
  return arr;
}

template <int D>
PointList<D> points_from_flat_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() % D != 0)
    field_error(field, "expected a flat array with a multiple of " + std::to_string(D) + " numbers");
  PointList<D> pts(j.size() / D);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < D; ++k) pts[i](k) = number(j[D * i + k], field);
  return pts;
}

Scene parse_scene_json(const json& j, const std::string& base_dir) {
  const int dim = integer(require(j, "dim", ""), "dim");
  if (dim == 2) return Scene{scene_from<2>(j, base_dir)};
  if (dim == 3) return Scene{scene_from<3>(j, base_dir)};
  field_error("dim", "must be 2 or 3");
}

Scene parse_scene_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1 + std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n');
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  try {
    return parse_scene_json(j, base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed scene: ") + e.what());
  }
}

Scene parse_scene(const std::string& path) {
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse_scene_text(read_text_file(path), base.empty() ? "." : base);
}

json scene_to_json(const Scene& scene) {
  return std::visit([](const auto& s) { return scene_data_to_json(s); }, scene.data);
}

template struct SceneData<2>;
template struct SceneData<3>;
template json matrix_spec_to_json(const MatrixSpec<2>&);
template json matrix_spec_to_json(const MatrixSpec<3>&);
template MatrixSpec<2> matrix_spec_from_json(const json&, const std::string&);
template MatrixSpec<3> matrix_spec_from_json(const json&, const std::string&);
template json points_to_json(const PointList<2>&);
template json points_to_json(const PointList<3>&);
template PointList<2> points_from_json(const json&, const std::string&);
template PointList<3> points_from_json(const json&, const std::string&);
template json points_to_flat_json(const PointList<2>&);
template json points_to_flat_json(const PointList<3>&);
template PointList<2> points_from_flat_json(const json&, const std::string&);
template PointList<3> points_from_flat_json(const json&, const std::string&);

}  // namespace anigreen
