#pragma once

#include "anigreen/cage.hpp"
#include "anigreen/containment.hpp"
#include "anigreen/kernels.hpp"
#include "anigreen/spd.hpp"

#include <cstdint>

namespace anigreen {

/// Coordinates of a point set: row p of phi / psi holds phi_i(points[p]) and
/// psi_j(points[p]).
template <int D>
struct CoordinateTable {
  PointList<D> points;
  RowMatrix phi;
  RowMatrix psi;
  std::uint64_t cage_id = 0;
  std::uint64_t matrix_id = 0;
};

template <int D>
std::uint64_t matrix_id(const SpdMatrix<D>& a) {
  return fingerprint(a.entries().data(), sizeof(double) * D * D);
}

/// Throws PointOutsideOrOnBoundary (with indices) unless the policy clamps.
template <int D>
CoordinateTable<D> compute_coords(const KernelContext<D>& ctx, const PointList<D>& points,
                                  const InteriorPolicy& policy = {});

template <int D>
CoordinateTable<D> compute_coords(const Cage<D>& cage, const SpdMatrix<D>& a, const PointList<D>& points,
                                  const InteriorPolicy& policy = {}) {
  return compute_coords(KernelContext<D>(a, cage), points, policy);
}

/// phi * a + psi * b with coefficient rows per vertex / face.
template <int D>
PointList<D> apply_coefficients(const CoordinateTable<D>& table, const RowMatrix& a, const RowMatrix& b);

/// Neumann coefficients s_j A n~_j (s_j = 1 without scaling).
template <int D>
RowMatrix neumann_coefficients(const CagePair<D>& pair, const SpdMatrix<D>& a, bool use_scale);

/// Deformed positions sum phi v~ + sum psi s_j A n~. Throws ConnectivityMismatch
/// when the pair's source is not the table's cage.
template <int D>
PointList<D> deform(const CoordinateTable<D>& table, const CagePair<D>& pair, const SpdMatrix<D>& a, bool use_scale);

/// Source-cage reconstruction; returns the table's points up to round-off.
template <int D>
PointList<D> reconstruct(const CoordinateTable<D>& table, const Cage<D>& cage, const SpdMatrix<D>& a);

/// A^{1/2} applied to the isotropic Green deformation of the A^{-1/2}-pulled
/// cages and points, scale factors fixed at 1.
template <int D>
PointList<D> similarity_reference_deform(const CagePair<D>& pair, const SpdMatrix<D>& a, const PointList<D>& points,
                                         const InteriorPolicy& policy = {});

}  // namespace anigreen
