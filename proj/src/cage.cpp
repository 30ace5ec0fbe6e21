#include "anigreen/cage.hpp"

#include "anigreen/error.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace anigreen {

namespace {

template <int D>
double bbox_diag_of(const PointList<D>& pts) {
  if (pts.empty()) return 0.0;
  Vec<D> lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

std::vector<Face<2>> implicit_edges(std::size_t n) {
  std::vector<Face<2>> faces(n);
  for (std::size_t i = 0; i < n; ++i) faces[i] = {int(i), int((i + 1) % n)};
  return faces;
}

void check_degenerate(const std::vector<double>& measures, double threshold) {
  std::vector<std::size_t> bad;
  for (std::size_t j = 0; j < measures.size(); ++j)
    if (!(measures[j] > threshold)) bad.push_back(j);
  if (!bad.empty())
    throw Error(ErrorCode::DegenerateFace, "degenerate face " + std::to_string(bad.front()), bad);
}

}  // namespace

template <int D>
void Cage<D>::compute_geometry() {
  bbox_diagonal_ = bbox_diag_of<D>(vertices_);
  normals_.resize(faces_.size());
  measures_.resize(faces_.size());
  for (std::size_t j = 0; j < faces_.size(); ++j) {
    const auto& f = faces_[j];
    if constexpr (D == 2) {
      Vec<2> a = vertices_[f[1]] - vertices_[f[0]];
      double len = a.norm();
      measures_[j] = len;
      normals_[j] = len > 0 ? Vec<2>(a.y() / len, -a.x() / len) : Vec<2>::Zero();
    } else {
      Vec<3> c = (vertices_[f[1]] - vertices_[f[0]]).cross(vertices_[f[2]] - vertices_[f[0]]);
      double len = c.norm();
      measures_[j] = 0.5 * len;
      normals_[j] = len > 0 ? Vec<3>(c / len) : Vec<3>::Zero();
    }
  }
  id_ = fingerprint(vertices_.data(), vertices_.size() * sizeof(Vec<D>));
  id_ = fingerprint(faces_.data(), faces_.size() * sizeof(Face<D>), id_);
}

template <int D>
Cage<D> Cage<D>::validate(PointList<D> vertices, std::vector<Face<D>> faces) {
  const std::size_t n = vertices.size();
  if (n < std::size_t(D + 1))
    throw Error(ErrorCode::NotClosed, "cage needs at least " + std::to_string(D + 1) + " vertices");
  for (std::size_t i = 0; i < n; ++i)
    if (!vertices[i].allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite cage vertex", {i});

  Cage cage;
  if constexpr (D == 2) {
    auto implicit = implicit_edges(n);
    if (!faces.empty() && faces != implicit)
      throw Error(ErrorCode::NotClosed, "2D cage edges must form the closed loop (i, i+1 mod n)");
    cage.faces_ = std::move(implicit);
  } else {
    if (faces.size() < 4) throw Error(ErrorCode::NotClosed, "3D cage needs at least 4 triangles");
    for (std::size_t j = 0; j < faces.size(); ++j)
      for (int k : faces[j])
        if (k < 0 || std::size_t(k) >= n)
          throw Error(ErrorCode::InvalidArgument, "face " + std::to_string(j) + " has out-of-range index", {j});
    // Every directed edge once, and its reverse once.
    std::map<std::pair<int, int>, int> directed;
    for (std::size_t j = 0; j < faces.size(); ++j) {
      const auto& f = faces[j];
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
        throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(j) + " repeats a vertex", {j});
      for (int e = 0; e < 3; ++e) ++directed[{f[e], f[(e + 1) % 3]}];
    }
    for (const auto& [edge, count] : directed) {
      auto rev = directed.find({edge.second, edge.first});
      if (count != 1 || rev == directed.end() || rev->second != 1)
        throw Error(ErrorCode::NotClosed,
                    "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                        ") is not shared by exactly two consistently oriented triangles");
    }
    cage.faces_ = std::move(faces);
  }
  cage.vertices_ = std::move(vertices);
  cage.compute_geometry();

  double diag = cage.bbox_diagonal_;
  check_degenerate(cage.measures_, D == 2 ? 1e-12 * diag : 1e-12 * diag * diag);
  if (!(cage.signed_measure() > 0.0))
    throw Error(ErrorCode::WrongOrientation,
                D == 2 ? "signed area is not positive (expected CCW)" : "enclosed signed volume is not positive");
  return cage;
}

template <int D>
Cage<D> Cage<D>::with_vertices(const Cage& reference, PointList<D> vertices) {
  if (vertices.size() != reference.num_vertices())
    throw Error(ErrorCode::ConnectivityMismatch,
                "expected " + std::to_string(reference.num_vertices()) + " vertices, got " +
                    std::to_string(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (!vertices[i].allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite cage vertex", {i});
  Cage cage;
  cage.vertices_ = std::move(vertices);
  cage.faces_ = reference.faces_;
  cage.compute_geometry();
  double diag = cage.bbox_diagonal_;
  check_degenerate(cage.measures_, D == 2 ? 1e-12 * diag : 1e-12 * diag * diag);
  return cage;
}

template <int D>
Vec<D> Cage<D>::bbox_min() const {
  Vec<D> lo = vertices_[0];
  for (const auto& p : vertices_) lo = lo.cwiseMin(p);
  return lo;
}

template <int D>
Vec<D> Cage<D>::bbox_max() const {
  Vec<D> hi = vertices_[0];
  for (const auto& p : vertices_) hi = hi.cwiseMax(p);
  return hi;
}

template <int D>
double Cage<D>::signed_measure() const {
  double acc = 0.0;
  if constexpr (D == 2) {
    for (const auto& f : faces_) {
      const auto& p = vertices_[f[0]];
      const auto& q = vertices_[f[1]];
      acc += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * acc;
  } else {
    // Relative to the centroid to keep cancellation down.
    Vec<3> c = Vec<3>::Zero();
    for (const auto& v : vertices_) c += v;
    c /= double(vertices_.size());
    for (const auto& f : faces_)
      acc += (vertices_[f[0]] - c).dot((vertices_[f[1]] - c).cross(vertices_[f[2]] - c));
    return acc / 6.0;
  }
}

template <int D>
CagePair<D> make_cage_pair(const Cage<D>& source, PointList<D> target_vertices) {
  CagePair<D> pair{source, Cage<D>::with_vertices(source, std::move(target_vertices)), {}};
  pair.scale_factors.resize(source.num_faces());
  for (std::size_t j = 0; j < source.num_faces(); ++j) pair.scale_factors[j] = scale_factor(pair.source, pair.target, j);
  return pair;
}

template <int D>
double scale_factor(const Cage<D>& source, const Cage<D>& target, std::size_t face) {
  if (face >= source.num_faces()) throw Error(ErrorCode::InvalidArgument, "face index out of range");
  double area = source.measures()[face];
  double diag = source.bbox_diagonal();
  if (!(area > (D == 2 ? 1e-12 * diag : 1e-12 * diag * diag)))
    throw Error(ErrorCode::DegenerateSourceFace, "source face " + std::to_string(face) + " is degenerate", {face});
  if constexpr (D == 2) {
    return target.measures()[face] / area;
  } else {
    // Start at the lowest vertex index; the value does not depend on it but
    // the rounding does.
    Face<3> f = source.face(face);
    int r = int(std::min_element(f.begin(), f.end()) - f.begin());
    std::rotate(f.begin(), f.begin() + r, f.end());
    Vec<3> u = source.vertex(f[1]) - source.vertex(f[0]);
    Vec<3> v = source.vertex(f[2]) - source.vertex(f[0]);
    Vec<3> ut = target.vertex(f[1]) - target.vertex(f[0]);
    Vec<3> vt = target.vertex(f[2]) - target.vertex(f[0]);
    double num = ut.squaredNorm() * v.squaredNorm() - 2.0 * ut.dot(vt) * u.dot(v) + vt.squaredNorm() * u.squaredNorm();
    return std::sqrt(std::max(num, 0.0)) / (std::sqrt(8.0) * area);
  }
}

template <int D>
Vec<D> face_barycentric(const Cage<D>& cage, std::size_t face, const Vec<D>& xi) {
  const auto& f = cage.face(face);
  if constexpr (D == 2) {
    Vec<2> a = cage.vertex(f[1]) - cage.vertex(f[0]);
    double t = (xi - cage.vertex(f[0])).dot(a) / a.squaredNorm();
    return Vec<2>(1.0 - t, t);
  } else {
    Vec<3> e1 = cage.vertex(f[1]) - cage.vertex(f[0]);
    Vec<3> e2 = cage.vertex(f[2]) - cage.vertex(f[0]);
    Vec<3> w = xi - cage.vertex(f[0]);
    double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    double w1 = w.dot(e1), w2 = w.dot(e2);
    double det = d11 * d22 - d12 * d12;
    double b1 = (d22 * w1 - d12 * w2) / det;
    double b2 = (d11 * w2 - d12 * w1) / det;
    return Vec<3>(1.0 - b1 - b2, b1, b2);
  }
}

template <int D>
double hat_eval(const Cage<D>& cage, std::size_t face, int vertex, const Vec<D>& xi) {
  if (face >= cage.num_faces()) throw Error(ErrorCode::InvalidArgument, "face index out of range");
  const auto& f = cage.face(face);
  auto it = std::find(f.begin(), f.end(), vertex);
  if (it == f.end())
    throw Error(ErrorCode::InvalidArgument,
                "vertex " + std::to_string(vertex) + " is not on face " + std::to_string(face));
  double tol = 1e-9 * cage.bbox_diagonal();
  Vec<D> bary = face_barycentric(cage, face, xi);
  Vec<D> proj = Vec<D>::Zero();
  for (int k = 0; k < D; ++k) proj += bary(k) * cage.vertex(f[k]);
  bool on = (proj - xi).norm() <= tol;
  // Barycentric slack measured in length units along the face.
  double slack = tol / std::max(cage.measures()[face], 1e-300);
  if constexpr (D == 3) slack = tol * std::sqrt(cage.measures()[face]) / cage.measures()[face];
  for (int k = 0; k < D && on; ++k) on = bary(k) >= -slack && bary(k) <= 1.0 + slack;
  if (!on) throw Error(ErrorCode::PointNotOnFace, "point is not on face " + std::to_string(face), {face});
  return std::clamp(bary(int(it - f.begin())), 0.0, 1.0);
}

template <int D>
Cage<D> transform_cage(const Cage<D>& cage, const Mat<D>& m) {
  double scale = m.cwiseAbs().maxCoeff();
  double det = m.determinant();
  if (!m.allFinite() || scale == 0.0 || std::abs(det) <= 1e-14 * std::pow(scale, D))
    throw Error(ErrorCode::SingularMatrix, "transform matrix is singular");
  PointList<D> verts(cage.num_vertices());
  for (std::size_t i = 0; i < verts.size(); ++i) verts[i] = m * cage.vertex(i);
  return Cage<D>::validate(std::move(verts), cage.faces());
}

double point_segment_distance(const Vec<2>& p, const Vec<2>& a, const Vec<2>& b) {
  Vec<2> ab = b - a;
  double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double point_triangle_distance(const Vec<3>& p, const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
  // Region classification (Ericson, Real-Time Collision Detection 5.1.5).
  Vec<3> ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  Vec<3> bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (a + d1 / (d1 - d3) * ab - p).norm();
  Vec<3> cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (a + d2 / (d2 - d6) * ac - p).norm();
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b) - p).norm();
  double denom = 1.0 / (va + vb + vc);
  return (a + ab * (vb * denom) + ac * (vc * denom) - p).norm();
}

template <int D>
double distance_to_boundary(const Cage<D>& cage, const Vec<D>& point) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : cage.faces()) {
    double d;
    if constexpr (D == 2)
      d = point_segment_distance(point, cage.vertex(f[0]), cage.vertex(f[1]));
    else
      d = point_triangle_distance(point, cage.vertex(f[0]), cage.vertex(f[1]), cage.vertex(f[2]));
    best = std::min(best, d);
  }
  return best;
}

template class Cage<2>;
template class Cage<3>;
template CagePair<2> make_cage_pair(const Cage<2>&, PointList<2>);
template CagePair<3> make_cage_pair(const Cage<3>&, PointList<3>);
template double scale_factor(const Cage<2>&, const Cage<2>&, std::size_t);
template double scale_factor(const Cage<3>&, const Cage<3>&, std::size_t);
template Vec<2> face_barycentric(const Cage<2>&, std::size_t, const Vec<2>&);
template Vec<3> face_barycentric(const Cage<3>&, std::size_t, const Vec<3>&);
template double hat_eval(const Cage<2>&, std::size_t, int, const Vec<2>&);
template double hat_eval(const Cage<3>&, std::size_t, int, const Vec<3>&);
template Cage<2> transform_cage(const Cage<2>&, const Mat<2>&);
template Cage<3> transform_cage(const Cage<3>&, const Mat<3>&);
template double distance_to_boundary(const Cage<2>&, const Vec<2>&);
template double distance_to_boundary(const Cage<3>&, const Vec<3>&);

}  // namespace anigreen
