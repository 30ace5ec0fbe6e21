#include "anigreen/coords.hpp"

#include "anigreen/error.hpp"
#include "anigreen/parallel.hpp"

namespace anigreen {

template <int D>
CoordinateTable<D> compute_coords(const KernelContext<D>& ctx, const PointList<D>& points,
                                  const InteriorPolicy& policy) {
  const Cage<D>& cage = ctx.source();
  CoordinateTable<D> table;
  table.points = enforce_interior(cage, points, policy);
  table.cage_id = cage.id();
  table.matrix_id = matrix_id(ctx.matrix());
  table.phi = RowMatrix::Zero(points.size(), cage.num_vertices());
  table.psi = RowMatrix::Zero(points.size(), cage.num_faces());
  parallel_for(points.size(), [&](std::size_t p) {
    const Vec<D>& eta = table.points[p];
    for (std::size_t j = 0; j < cage.num_faces(); ++j) {
      FaceJet<D> jet = ctx.face_jet(j, eta);
      table.psi(p, j) = jet.psi;
      const auto& f = cage.face(j);
      for (int k = 0; k < D; ++k) table.phi(p, f[k]) += jet.phi(k);
    }
  });
  return table;
}

template <int D>
PointList<D> apply_coefficients(const CoordinateTable<D>& table, const RowMatrix& a, const RowMatrix& b) {
  if (a.rows() != table.phi.cols() || b.rows() != table.psi.cols() || a.cols() != D || b.cols() != D)
    throw Error(ErrorCode::ConnectivityMismatch, "coefficient shape does not match the coordinate table");
  RowMatrix out = table.phi * a + table.psi * b;
  PointList<D> pts(out.rows());
  for (Eigen::Index i = 0; i < out.rows(); ++i) pts[i] = out.row(i).transpose();
  return pts;
}

template <int D>
RowMatrix neumann_coefficients(const CagePair<D>& pair, const SpdMatrix<D>& a, bool use_scale) {
  RowMatrix b(pair.target.num_faces(), D);
  for (std::size_t j = 0; j < pair.target.num_faces(); ++j) {
    double s = use_scale ? pair.scale_factors[j] : 1.0;
    b.row(j) = (s * (a.entries() * pair.target.normal(j))).transpose();
  }
  return b;
}

namespace {

template <int D>
RowMatrix vertex_rows(const Cage<D>& cage) {
  RowMatrix m(cage.num_vertices(), D);
  for (std::size_t i = 0; i < cage.num_vertices(); ++i) m.row(i) = cage.vertex(i).transpose();
  return m;
}

}  // namespace

template <int D>
PointList<D> deform(const CoordinateTable<D>& table, const CagePair<D>& pair, const SpdMatrix<D>& a, bool use_scale) {
  if (pair.source.id() != table.cage_id || std::size_t(table.phi.cols()) != pair.source.num_vertices())
    throw Error(ErrorCode::ConnectivityMismatch, "cage pair does not match the coordinate table's cage");
  if (matrix_id(a) != table.matrix_id)
    throw Error(ErrorCode::InvalidArgument, "matrix does not match the coordinate table's matrix");
  return apply_coefficients(table, vertex_rows(pair.target), neumann_coefficients(pair, a, use_scale));
}

template <int D>
PointList<D> reconstruct(const CoordinateTable<D>& table, const Cage<D>& cage, const SpdMatrix<D>& a) {
  auto pair = make_cage_pair(cage, cage.vertices());
  return deform(table, pair, a, false);
}

template <int D>
PointList<D> similarity_reference_deform(const CagePair<D>& pair, const SpdMatrix<D>& a, const PointList<D>& points,
                                         const InteriorPolicy& policy) {
  const Mat<D>& t = a.inv_sqrt();
  Cage<D> src = transform_cage(pair.source, t);
  PointList<D> tv(pair.target.num_vertices());
  for (std::size_t i = 0; i < tv.size(); ++i) tv[i] = t * pair.target.vertex(i);
  auto pulled = make_cage_pair(src, std::move(tv));
  PointList<D> y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) y[i] = t * points[i];
  // Containment is affine invariant; check it on the original cage so the
  // clearance means the same thing as for compute_coords.
  enforce_interior(pair.source, points, InteriorPolicy{policy.eps, false});
  auto iso = SpdMatrix<D>::identity();
  auto table = compute_coords(src, iso, y, InteriorPolicy{0.0, false});
  PointList<D> out = deform(table, pulled, iso, false);
  for (auto& p : out) p = a.sqrt() * p;
  return out;
}

template CoordinateTable<2> compute_coords(const KernelContext<2>&, const PointList<2>&, const InteriorPolicy&);
template CoordinateTable<3> compute_coords(const KernelContext<3>&, const PointList<3>&, const InteriorPolicy&);
template PointList<2> apply_coefficients(const CoordinateTable<2>&, const RowMatrix&, const RowMatrix&);
template PointList<3> apply_coefficients(const CoordinateTable<3>&, const RowMatrix&, const RowMatrix&);
template RowMatrix neumann_coefficients(const CagePair<2>&, const SpdMatrix<2>&, bool);
template RowMatrix neumann_coefficients(const CagePair<3>&, const SpdMatrix<3>&, bool);
template PointList<2> deform(const CoordinateTable<2>&, const CagePair<2>&, const SpdMatrix<2>&, bool);
template PointList<3> deform(const CoordinateTable<3>&, const CagePair<3>&, const SpdMatrix<3>&, bool);
template PointList<2> reconstruct(const CoordinateTable<2>&, const Cage<2>&, const SpdMatrix<2>&);
template PointList<3> reconstruct(const CoordinateTable<3>&, const Cage<3>&, const SpdMatrix<3>&);
template PointList<2> similarity_reference_deform(const CagePair<2>&, const SpdMatrix<2>&, const PointList<2>&,
                                                  const InteriorPolicy&);
template PointList<3> similarity_reference_deform(const CagePair<3>&, const SpdMatrix<3>&, const PointList<3>&,
                                                  const InteriorPolicy&);

}  // namespace anigreen
