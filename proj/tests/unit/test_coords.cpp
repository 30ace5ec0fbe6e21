#include "anigreen/coords.hpp"
#include "anigreen/error.hpp"
#include "anigreen/quadrature.hpp"
#include "anigreen/variational.hpp"
#include "fixtures.hpp"
#include "lipman_reference.hpp"

#include <gtest/gtest.h>

using namespace anigreen;
using namespace anigreen::fixtures;

namespace {

template <int D>
double max_dist(const PointList<D>& a, const PointList<D>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).norm());
  return m;
}

template <int D>
void expect_invariants(const Cage<D>& cage, const SpdMatrix<D>& a, const PointList<D>& pts) {
  CoordinateTable<D> t = compute_coords(cage, a, pts);
  for (Eigen::Index r = 0; r < t.phi.rows(); ++r) EXPECT_NEAR(t.phi.row(r).sum(), 1.0, 1e-10);
  EXPECT_LT(max_dist<D>(reconstruct(t, cage, a), pts), 1e-10 * cage.bbox_diagonal());
}

}  // namespace

TEST(Coords, UnitSquareCenter) {
  Cage<2> c = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CoordinateTable<2> t = compute_coords(c, Spd2::identity(), {Vec<2>(0.5, 0.5)});
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(t.phi(0, i), 0.25, 1e-15);
  Vec<2> s = Vec<2>::Zero();
  for (int j = 0; j < 4; ++j) s += t.psi(0, j) * c.normal(j);
  EXPECT_LT(s.norm(), 1e-15);
}

TEST(Coords, PartitionOfUnityAndReproduction) {
  Rng rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    Cage<2> c = random_polygon(rng, 4 + trial, trial % 3 == 0);
    expect_invariants<2>(c, random_spd2(rng), sample_interior_points(c, 20, trial, 0.01));
  }
  for (const auto& c : {cube_cage(), icosphere_cage(1), l_prism_cage(), perturbed_sphere_cage(rng, 1, 0.25)})
    expect_invariants<3>(c, random_spd3(rng), sample_interior_points(c, 10, 3, 0.01));
}

TEST(Coords, MatchesPureQuadratureTable) {
  Rng rng(21);
  Cage<2> c = random_polygon(rng, 9, false);
  Spd2 a = random_spd2(rng);
  PointList<2> pts = sample_interior_points(c, 5, 1);
  CoordinateTable<2> t = compute_coords(c, a, pts);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(c.num_vertices());
    for (std::size_t f = 0; f < c.num_faces(); ++f) {
      auto q = quadrature_face(a, c, f, pts[p]);
      EXPECT_NEAR(t.psi(p, f), q.psi, 1e-6 * std::abs(q.psi));
      for (int k = 0; k < 2; ++k) phi(c.face(f)[k]) += q.phi(k);
    }
    for (std::size_t i = 0; i < c.num_vertices(); ++i) EXPECT_NEAR(t.phi(p, i), phi(i), 1e-6 * std::abs(phi(i)) + 1e-12);
  }
}

TEST(Coords, ExteriorPointsAreReported) {
  Cage<2> c = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  try {
    compute_coords(c, Spd2::identity(), {Vec<2>(0.5, 0.5), Vec<2>(1.5, 0.5)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOutsideOrOnBoundary);
    EXPECT_EQ(e.indices(), std::vector<std::size_t>{1});
  }
}

TEST(Deform, IdentityPairEchoesInput) {
  Rng rng(22);
  Cage<3> c = perturbed_sphere_cage(rng, 1, 0.2);
  Spd3 a = random_spd3(rng);
  PointList<3> pts = sample_interior_points(c, 20, 5);
  CoordinateTable<3> t = compute_coords(c, a, pts);
  CagePair<3> pair = make_cage_pair(c, c.vertices());
  EXPECT_LT(max_dist<3>(deform(t, pair, a, true), pts), 1e-10 * c.bbox_diagonal());
  EXPECT_LT(max_dist<3>(deform(t, pair, a, false), pts), 1e-10 * c.bbox_diagonal());
}

TEST(Deform, TranslationPair) {
  Rng rng(23);
  Cage<2> c = random_polygon(rng, 11, false);
  Spd2 a = random_spd2(rng);
  PointList<2> pts = sample_interior_points(c, 30, 6);
  PointList<2> tv = c.vertices();
  const Vec<2> shift(0.7, -1.3);
  for (auto& v : tv) v += shift;
  PointList<2> out = deform(compute_coords(c, a, pts), make_cage_pair(c, tv), a, true);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LT((out[i] - pts[i] - shift).norm(), 1e-10);
}

TEST(Deform, IdentityMatrixIsTheIsotropicPipeline) {
  Rng rng(24);
  Cage<2> c = random_polygon(rng, 8, false);
  PointList<2> tv = c.vertices();
  for (auto& v : tv) v += Vec<2>(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
  CagePair<2> pair = make_cage_pair(c, tv);
  PointList<2> pts = sample_interior_points(c, 10, 1);
  PointList<2> out = deform(compute_coords(c, Spd2::identity(), pts), pair, Spd2::identity(), true);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    IsoReference ref = iso_reference(c, pts[p]);
    Vec<2> x = Vec<2>::Zero();
    for (std::size_t i = 0; i < c.num_vertices(); ++i) x += ref.phi(i) * tv[i];
    for (std::size_t j = 0; j < c.num_faces(); ++j) x += ref.psi(j) * pair.scale_factors[j] * pair.target.normal(j);
    EXPECT_LT((out[p] - x).norm(), 1e-10);
  }
}

TEST(Deform, MismatchedTable) {
  Cage<2> c = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Cage<2> other = Cage<2>::validate({{0, 0}, {2, 0}, {2, 1}, {0, 1}});
  CoordinateTable<2> t = compute_coords(c, Spd2::identity(), {Vec<2>(0.5, 0.5)});
  try {
    deform(t, make_cage_pair(other, other.vertices()), Spd2::identity(), true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConnectivityMismatch);
  }
  EXPECT_THROW(deform(t, make_cage_pair(c, c.vertices()), build_2d({0.1, 1, 2}), true), Error);
}

TEST(SimilarityPath, ExactWhereTheNormalNormsAgree) {
  Rng rng(25);
  Cage<2> c = random_polygon(rng, 10, false);
  PointList<2> pts = sample_interior_points(c, 10, 2);
  // identity matrix: any target
  PointList<2> tv = c.vertices();
  for (auto& v : tv) v += Vec<2>(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
  CagePair<2> wobble = make_cage_pair(c, tv);
  const Spd2 id = Spd2::identity();
  EXPECT_LT(max_dist<2>(similarity_reference_deform(wobble, id, pts), deform(compute_coords(c, id, pts), wobble, id, false)),
            1e-10 * c.bbox_diagonal());
  // any matrix: identity pair, translated and uniformly scaled targets keep every normal
  const Spd2 a = random_spd2(rng);
  CoordinateTable<2> t = compute_coords(c, a, pts);
  for (double scale : {1.0, 1.7}) {
    PointList<2> sv;
    for (const auto& v : c.vertices()) sv.push_back(scale * v + Vec<2>(0.3, -0.4));
    CagePair<2> pair = make_cage_pair(c, sv);
    EXPECT_LT(max_dist<2>(similarity_reference_deform(pair, a, pts), deform(t, pair, a, false)), 1e-10 * c.bbox_diagonal());
  }
}

TEST(SimilarityPath, DiffersByTheRatioOfNormalNorms) {
  // Pulling a deformed target back rescales face j's psi term by
  // |A^1/2 n_j| / |A^1/2 n~_j|; the anisotropic path keeps the source norm.
  Rng rng(26);
  Cage<3> c = perturbed_sphere_cage(rng, 1, 0.15);
  const Spd3 a = random_spd3(rng, 20);
  PointList<3> tv = c.vertices();
  for (auto& v : tv) v += 0.05 * Vec<3>(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  CagePair<3> pair = make_cage_pair(c, tv);
  PointList<3> pts = sample_interior_points(c, 8, 4);
  CoordinateTable<3> t = compute_coords(c, a, pts);
  RowMatrix b(c.num_faces(), 3);
  for (std::size_t j = 0; j < c.num_faces(); ++j) {
    const double ratio = (a.sqrt() * c.normal(j)).norm() / (a.sqrt() * pair.target.normal(j)).norm();
    b.row(j) = (ratio * a.entries() * pair.target.normal(j)).transpose();
  }
  RowMatrix av(tv.size(), 3);
  for (std::size_t i = 0; i < tv.size(); ++i) av.row(i) = tv[i].transpose();
  EXPECT_LT(max_dist<3>(similarity_reference_deform(pair, a, pts), apply_coefficients(t, av, b)), 1e-10 * c.bbox_diagonal());
}

TEST(MatrixScaling, TwoDimensionalDeformationUnderCTimesA) {
  // In 2D, A -> cA adds (log c) * |t_j| * const to psi_j. Against b_j = s_j A n~_j
  // that sums to a multiple of sum |t~_j| n~_j = 0, so with scale factors the
  // deformation is unchanged for any target; with s_j = 1 only when n~ = n.
  Rng rng(27);
  Cage<2> c = random_polygon(rng, 9, false);
  const Spd2 a = random_spd2(rng);
  const Spd2 ca = Spd2::validate(3.5 * a.entries());
  PointList<2> pts = sample_interior_points(c, 12, 3);
  CoordinateTable<2> t1 = compute_coords(c, a, pts), t2 = compute_coords(c, ca, pts);
  PointList<2> tv = c.vertices();
  for (auto& v : tv) v += Vec<2>(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
  CagePair<2> wobble = make_cage_pair(c, tv), same = make_cage_pair(c, c.vertices());
  const double tol = 1e-10 * c.bbox_diagonal();
  EXPECT_LT(max_dist<2>(deform(t1, same, a, false), deform(t2, same, ca, false)), tol);
  EXPECT_LT(max_dist<2>(deform(t1, wobble, a, true), deform(t2, wobble, ca, true)), tol);
  EXPECT_GT(max_dist<2>(deform(t1, wobble, a, false), deform(t2, wobble, ca, false)), 1e-4 * c.bbox_diagonal());
}
