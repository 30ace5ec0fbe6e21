#pragma once

#include "anigreen/cage.hpp"

#include <vector>

namespace anigreen {

/// Winding number (2D) or generalized winding number (3D) of the cage around
/// a point: 1 inside, 0 outside.
template <int D>
double winding_number(const Cage<D>& cage, const Vec<D>& point);

/// Unit inward normal of the face nearest to the point.
template <int D>
Vec<D> inward_direction(const Cage<D>& cage, const Vec<D>& point);

struct InteriorPolicy {
  // Minimum clearance to the boundary; negative selects 1e-6 * bbox diagonal.
  double eps = -1.0;
  // Move failing points inward instead of reporting them.
  bool clamp_inward = false;

  double resolve(double bbox_diagonal) const { return eps < 0 ? 1e-6 * bbox_diagonal : eps; }
};

template <int D>
bool is_interior(const Cage<D>& cage, const Vec<D>& point, double eps);

/// Returns the points unchanged when all pass; otherwise throws
/// PointOutsideOrOnBoundary listing the offending indices, or with
/// clamp_inward set, nudges them inward by eps steps along the winding gradient.
template <int D>
PointList<D> enforce_interior(const Cage<D>& cage, const PointList<D>& points, const InteriorPolicy& policy);

}  // namespace anigreen
