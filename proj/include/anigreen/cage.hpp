#pragma once

#include "anigreen/types.hpp"

#include <cstddef>
#include <vector>

namespace anigreen {

/// Oriented simplicial cage: a closed CCW polygon in 2D (edge j runs from
/// vertex j to vertex j+1 mod n) or a closed, outward-oriented triangle mesh
/// in 3D. Normals and measures are derived from the vertices on construction.
template <int D>
class Cage {
 public:
  static_assert(D == 2 || D == 3);

  /// Checks closedness, orientation and face non-degeneracy. In 2D the faces
  /// argument may be empty (edges are implicit); when given it must list the
  /// implicit edges. Throws NotClosed, WrongOrientation or DegenerateFace.
  static Cage validate(PointList<D> vertices, std::vector<Face<D>> faces = {});

  /// Same connectivity as `reference`, new vertex positions. Only face
  /// non-degeneracy is enforced: deformed targets may fold.
  static Cage with_vertices(const Cage& reference, PointList<D> vertices);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  const PointList<D>& vertices() const { return vertices_; }
  const std::vector<Face<D>>& faces() const { return faces_; }
  const Vec<D>& vertex(std::size_t i) const { return vertices_[i]; }
  const Face<D>& face(std::size_t j) const { return faces_[j]; }
  // Unit outward normals.
  const PointList<D>& normals() const { return normals_; }
  const Vec<D>& normal(std::size_t j) const { return normals_[j]; }
  // Edge lengths (2D) or triangle areas (3D).
  const std::vector<double>& measures() const { return measures_; }
  double bbox_diagonal() const { return bbox_diagonal_; }
  Vec<D> bbox_min() const;
  Vec<D> bbox_max() const;
  // Signed area (2D) or signed enclosed volume (3D).
  double signed_measure() const;

  std::uint64_t id() const { return id_; }

 private:
  Cage() = default;
  void compute_geometry();

  PointList<D> vertices_;
  std::vector<Face<D>> faces_;
  PointList<D> normals_;
  std::vector<double> measures_;
  double bbox_diagonal_ = 0.0;
  std::uint64_t id_ = 0;
};

using Cage2 = Cage<2>;
using Cage3 = Cage<3>;

/// Source and deformed cage with per-face scale factors.
template <int D>
struct CagePair {
  Cage<D> source;
  Cage<D> target;
  std::vector<double> scale_factors;
};

/// Throws ConnectivityMismatch when the vertex count differs.
template <int D>
CagePair<D> make_cage_pair(const Cage<D>& source, PointList<D> target_vertices);

/// Per-face stretch factor: edge length ratio in 2D; in 3D
/// sqrt(|u~|^2|v|^2 - 2(u~.v~)(u.v) + |v~|^2|u|^2) / (sqrt(8) area).
template <int D>
double scale_factor(const Cage<D>& source, const Cage<D>& target, std::size_t face);

template <int D>
double scale_factor(const CagePair<D>& pair, std::size_t face) {
  return scale_factor(pair.source, pair.target, face);
}

/// Hat function of `vertex` (global index, must belong to `face`) at a point
/// on the face: the simplex barycentric coordinate. Throws PointNotOnFace.
template <int D>
double hat_eval(const Cage<D>& cage, std::size_t face, int vertex, const Vec<D>& xi);

/// Barycentric coordinates of a point with respect to the face's vertices,
/// in face order. No on-face check.
template <int D>
Vec<D> face_barycentric(const Cage<D>& cage, std::size_t face, const Vec<D>& xi);

/// Left-multiplies all vertices by m; normals and measures are recomputed.
/// Throws SingularMatrix, or the validation errors for det m < 0.
template <int D>
Cage<D> transform_cage(const Cage<D>& cage, const Mat<D>& m);

// Distance from a point to the cage boundary.
template <int D>
double distance_to_boundary(const Cage<D>& cage, const Vec<D>& point);

double point_segment_distance(const Vec<2>& p, const Vec<2>& a, const Vec<2>& b);
double point_triangle_distance(const Vec<3>& p, const Vec<3>& a, const Vec<3>& b, const Vec<3>& c);

}  // namespace anigreen
