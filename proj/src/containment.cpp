#include "anigreen/containment.hpp"

#include "anigreen/error.hpp"
#include "anigreen/kernels.hpp"
#include "anigreen/parallel.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

namespace anigreen {

namespace {

double solid_angle(const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
  double la = a.norm(), lb = b.norm(), lc = c.norm();
  double det = a.dot(b.cross(c));
  double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2.0 * std::atan2(det, den);
}

}  // namespace

template <int D>
double winding_number(const Cage<D>& cage, const Vec<D>& point) {
  double total = 0.0;
  for (const auto& f : cage.faces()) {
    if constexpr (D == 2) {
      Vec<2> w0 = cage.vertex(f[0]) - point, w1 = cage.vertex(f[1]) - point;
      total += std::atan2(w0.x() * w1.y() - w0.y() * w1.x(), w0.dot(w1));
    } else {
      total += solid_angle(cage.vertex(f[0]) - point, cage.vertex(f[1]) - point, cage.vertex(f[2]) - point);
    }
  }
  return total / unit_sphere_area<D>();
}

template <int D>
Vec<D> inward_direction(const Cage<D>& cage, const Vec<D>& point) {
  // minus the normal of the nearest face; the winding number itself is flat off the surface
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const auto& f = cage.face(j);
    double d;
    if constexpr (D == 2)
      d = point_segment_distance(point, cage.vertex(f[0]), cage.vertex(f[1]));
    else
      d = point_triangle_distance(point, cage.vertex(f[0]), cage.vertex(f[1]), cage.vertex(f[2]));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return -cage.normal(best);
}

template <int D>
bool is_interior(const Cage<D>& cage, const Vec<D>& point, double eps) {
  if (!point.allFinite()) return false;
  if (distance_to_boundary(cage, point) < eps) return false;
  return winding_number(cage, point) > 0.5;
}

template <int D>
PointList<D> enforce_interior(const Cage<D>& cage, const PointList<D>& points, const InteriorPolicy& policy) {
  const double eps = policy.resolve(cage.bbox_diagonal());
  PointList<D> out = points;
  std::vector<char> bad(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t i) {
    if (is_interior(cage, out[i], eps)) return;
    if (policy.clamp_inward) {
      for (int step = 0; step < 64; ++step) {
        const Vec<D> g = inward_direction(cage, out[i]);
        if (!(g.norm() > 0)) break;
        out[i] += eps * g.normalized();
        if (is_interior(cage, out[i], eps)) return;
      }
    }
    bad[i] = 1;
  });
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (bad[i]) idx.push_back(i);
  if (!idx.empty())
    throw Error(ErrorCode::PointOutsideOrOnBoundary,
                std::to_string(idx.size()) + " point(s) outside the cage or within " + std::to_string(eps) +
                    " of its boundary (first index " + std::to_string(idx.front()) + ")",
                idx);
  return out;
}

template double winding_number(const Cage<2>&, const Vec<2>&);
template double winding_number(const Cage<3>&, const Vec<3>&);
template Vec<2> inward_direction(const Cage<2>&, const Vec<2>&);
template Vec<3> inward_direction(const Cage<3>&, const Vec<3>&);
template bool is_interior(const Cage<2>&, const Vec<2>&, double);
template bool is_interior(const Cage<3>&, const Vec<3>&, double);
template PointList<2> enforce_interior(const Cage<2>&, const PointList<2>&, const InteriorPolicy&);
template PointList<3> enforce_interior(const Cage<3>&, const PointList<3>&, const InteriorPolicy&);

}  // namespace anigreen
