#pragma once

#include "anigreen/cage.hpp"
#include "anigreen/containment.hpp"
#include "anigreen/spd.hpp"
#include "anigreen/variational.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace anigreen {

// Regular lattice over [lo, hi]; only interior points are kept.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  Vec<2> lo = Vec<2>::Zero();
  Vec<2> hi = Vec<2>::Zero();
};

template <int D>
struct VariationalConfig {
  std::vector<PositionalConstraint<D>> constraints;
  PointList<D> arap_points;
  int hessian_per_face = 10;
  double hessian_offset = 0.01;
  VariationalWeights weights;
  SolverOptions solver;
};

template <int D>
struct SceneData {
  Cage<D> source;
  std::optional<PointList<D>> target;
  MatrixSpec<D> matrix_spec;
  SpdMatrix<D> matrix;
  PointList<D> object_vertices;
  std::vector<std::vector<int>> object_faces;
  std::optional<GridSpec> grid;
  double interior_eps = -1.0;
  bool clamp_inward = false;
  bool use_scale = true;
  std::uint64_t seed = 0;
  std::optional<VariationalConfig<D>> variational;

  InteriorPolicy policy() const { return InteriorPolicy{interior_eps, clamp_inward}; }
  // Target (or the source itself when no target is given) paired with the source.
  CagePair<D> pair() const { return make_cage_pair(source, target ? *target : source.vertices()); }
  VariationalProblem<D> variational_problem() const;
};

struct Scene {
  std::variant<SceneData<2>, SceneData<3>> data;
  int dim() const { return data.index() == 0 ? 2 : 3; }
};

/// Radians from a number or a string like "pi/6", "-2*pi/3", "0.25pi".
double parse_angle(const nlohmann::json& value, const std::string& field = "angle");

/// Throws ParseError (with line or field) or the validator's error with the
/// field it came from prefixed to the message.
Scene parse_scene(const std::string& path);
Scene parse_scene_text(const std::string& text, const std::string& base_dir = ".");
Scene parse_scene_json(const nlohmann::json& j, const std::string& base_dir = ".");

/// Self-contained form: geometry embedded, mesh references resolved.
nlohmann::json scene_to_json(const Scene& scene);

template <int D>
nlohmann::json matrix_spec_to_json(const MatrixSpec<D>& spec);
template <int D>
MatrixSpec<D> matrix_spec_from_json(const nlohmann::json& j, const std::string& field = "matrix");

template <int D>
nlohmann::json points_to_json(const PointList<D>& pts);
template <int D>
PointList<D> points_from_json(const nlohmann::json& j, const std::string& field);

/// Flat row-major number array, as used on the wire.
template <int D>
nlohmann::json points_to_flat_json(const PointList<D>& pts);
template <int D>
PointList<D> points_from_flat_json(const nlohmann::json& j, const std::string& field);

}  // namespace anigreen
