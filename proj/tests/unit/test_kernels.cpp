#include "anigreen/coords.hpp"
#include "anigreen/kernels.hpp"
#include "anigreen/quadrature.hpp"
#include "anigreen/variational.hpp"
#include "fixtures.hpp"
#include "lipman_reference.hpp"

#include <gtest/gtest.h>

using namespace anigreen;
using namespace anigreen::fixtures;

TEST(FundamentalSolution, IsotropicMatchesTextbook) {
  const Vec<2> x(1.0, 2.0), y(-0.5, 0.25);
  EXPECT_NEAR(fundamental_solution(Spd2::identity(), x, y), std::log((x - y).norm()) / (2 * kPi), 1e-15);
  const Vec<3> x3(1.0, 2.0, 0.5), y3(0.0, -1.0, 0.25);
  EXPECT_NEAR(fundamental_solution(Spd3::identity(), x3, y3), -1.0 / (4 * kPi * (x3 - y3).norm()), 1e-15);
}

TEST(FundamentalSolution, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Spd3 a = random_spd3(rng);
    Vec<3> x = Vec<3>::Random(), y = Vec<3>::Random() + Vec<3>(2, 0, 0);
    Vec<3> g = fundamental_gradient(a, x, y), fd;
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      Vec<3> e = Vec<3>::Unit(k) * h;
      fd(k) = (fundamental_solution(a, Vec<3>(x + e), y) - fundamental_solution(a, Vec<3>(x - e), y)) / (2 * h);
    }
    EXPECT_LT((g - fd).norm() / g.norm(), 1e-6);

    Spd2 a2 = random_spd2(rng);
    Vec<2> x2 = Vec<2>::Random(), y2 = Vec<2>::Random() + Vec<2>(2, 0);
    Vec<2> g2 = fundamental_gradient(a2, x2, y2), fd2;
    for (int k = 0; k < 2; ++k) {
      Vec<2> e = Vec<2>::Unit(k) * h;
      fd2(k) = (fundamental_solution(a2, Vec<2>(x2 + e), y2) - fundamental_solution(a2, Vec<2>(x2 - e), y2)) / (2 * h);
    }
    EXPECT_LT((g2 - fd2).norm() / g2.norm(), 1e-6);
  }
}

TEST(FundamentalSolution, CoincidentPointsThrow) {
  const Vec<2> x(0.3, 0.4);
  try {
    fundamental_solution(Spd2::identity(), x, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoincidentPoints);
  }
}

TEST(IsoKernels, MatchIndependentReference2D) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Cage<2> cage = random_polygon(rng, 4 + trial % 20, trial % 2 == 0);
    for (const auto& p : sample_interior_points(cage, 3, trial)) {
      IsoReference ref = iso_reference(cage, p);
      CoordinateTable<2> t = compute_coords(cage, Spd2::identity(), {p});
      for (std::size_t i = 0; i < cage.num_vertices(); ++i) EXPECT_NEAR(t.phi(0, i), ref.phi(i), 1e-10);
      for (std::size_t j = 0; j < cage.num_faces(); ++j) EXPECT_NEAR(t.psi(0, j), ref.psi(j), 1e-10);
    }
  }
}

TEST(IsoKernels, MatchIndependentReference3D) {
  Rng rng(6);
  std::vector<Cage<3>> cages = {cube_cage(), icosphere_cage(1), perturbed_sphere_cage(rng, 1, 0.2), l_prism_cage()};
  for (std::size_t c = 0; c < cages.size(); ++c) {
    for (const auto& p : sample_interior_points(cages[c], 4, c)) {
      IsoReference ref = iso_reference(cages[c], p);
      CoordinateTable<3> t = compute_coords(cages[c], Spd3::identity(), {p});
      for (std::size_t i = 0; i < cages[c].num_vertices(); ++i) EXPECT_NEAR(t.phi(0, i), ref.phi(i), 1e-10);
      for (std::size_t j = 0; j < cages[c].num_faces(); ++j) EXPECT_NEAR(t.psi(0, j), ref.psi(j), 1e-10);
    }
  }
}

TEST(IsoKernels, PointOnEdgeIsSingular) {
  Simplex<2> edge = {Vec<2>(0, 0), Vec<2>(1, 0)};
  EXPECT_THROW(iso_face_jet<2>(edge, Vec<2>(0.5, 0.0)), Error);
  EXPECT_THROW(iso_face_jet<2>(edge, Vec<2>(0.0, 0.0)), Error);
  // on the line but outside the segment is fine
  EXPECT_NO_THROW(iso_face_jet<2>(edge, Vec<2>(2.0, 0.0)));
  Simplex<3> tri = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0)};
  EXPECT_THROW(iso_face_jet<3>(tri, Vec<3>(0.2, 0.2, 0.0)), Error);
}

TEST(IsoKernels, OppositeSidesOfAFace) {
  // phi jumps by the hat function across the face, psi is continuous
  Simplex<3> tri = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0)};
  const double d = 1e-9;
  auto above = iso_face_jet<3>(tri, Vec<3>(0.2, 0.3, d));
  auto below = iso_face_jet<3>(tri, Vec<3>(0.2, 0.3, -d));
  EXPECT_NEAR(above.psi, below.psi, 1e-7);
  EXPECT_NEAR(std::abs(above.phi(0) - below.phi(0)), 0.5, 1e-6);
  EXPECT_NEAR(std::abs(above.phi(1) - below.phi(1)), 0.2, 1e-6);
  EXPECT_NEAR(std::abs(above.phi(2) - below.phi(2)), 0.3, 1e-6);
}

TEST(AnisoKernels, NeumannRescale) {
  Spd2 a = build_2d({kPi / 6, 1.0, 4.0});
  Cage<2> cage = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  KernelContext<2> ctx(a, cage);
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const Vec<2> n = cage.normal(j);
    EXPECT_NEAR(ctx.neumann_rescale()[j], 1.0 / std::sqrt(n.dot(a.entries() * n)), 1e-14);
  }
}

TEST(AnisoKernels, MatchQuadrature2D) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Cage<2> cage = random_polygon(rng, 5 + trial, trial % 2);
    Spd2 a = random_spd2(rng);
    KernelContext<2> ctx(a, cage);
    OracleReport r = compare_with_oracle(ctx, sample_interior_points(cage, 3, trial, 0.01));
    EXPECT_LT(r.max_rel_error, 1e-9);
  }
}

TEST(AnisoKernels, MatchQuadrature3D) {
  Rng rng(10);
  std::vector<Cage<3>> cages = {cube_cage(), l_prism_cage(), perturbed_sphere_cage(rng, 1, 0.15)};
  for (std::size_t c = 0; c < cages.size(); ++c) {
    Spd3 a = random_spd3(rng);
    KernelContext<3> ctx(a, cages[c]);
    OracleReport r = compare_with_oracle(ctx, sample_interior_points(cages[c], 2, c, 0.01));
    EXPECT_LT(r.max_rel_error, 1e-9);
  }
}

namespace {

template <int D>
void check_jet_derivatives(const KernelContext<D>& ctx, const Vec<D>& eta, double h) {
  for (std::size_t f = 0; f < ctx.source().num_faces(); ++f) {
    FaceJet<D> jet = ctx.face_jet(f, eta, JetOrder::Hessian);
    Vec<D> gpsi;
    Mat<D> hpsi;
    std::array<Vec<D>, D> gphi;
    std::array<Mat<D>, D> hphi;
    for (int k = 0; k < D; ++k) {
      const Vec<D> e = Vec<D>::Unit(k) * h;
      FaceJet<D> p = ctx.face_jet(f, eta + e, JetOrder::Gradient), m = ctx.face_jet(f, eta - e, JetOrder::Gradient);
      gpsi(k) = (p.psi - m.psi) / (2 * h);
      hpsi.col(k) = (p.grad_psi - m.grad_psi) / (2 * h);
      for (int v = 0; v < D; ++v) {
        gphi[v](k) = (p.phi(v) - m.phi(v)) / (2 * h);
        hphi[v].col(k) = (p.grad_phi[v] - m.grad_phi[v]) / (2 * h);
      }
    }
    const double gs = std::max(jet.grad_psi.norm(), 1e-8);
    EXPECT_LT((jet.grad_psi - gpsi).norm() / gs, 1e-5);
    EXPECT_LT((jet.hess_psi - hpsi).norm() / std::max(jet.hess_psi.norm(), 1e-8), 1e-4);
    // generalized harmonicity
    const Mat<D>& A = ctx.matrix().entries();
    EXPECT_LT(std::abs((A.cwiseProduct(jet.hess_psi)).sum()) / (A.norm() * jet.hess_psi.norm() + 1e-300), 1e-6);
    for (int v = 0; v < D; ++v) {
      EXPECT_LT((jet.grad_phi[v] - gphi[v]).norm() / std::max(jet.grad_phi[v].norm(), 1e-8), 1e-5);
      EXPECT_LT((jet.hess_phi[v] - hphi[v]).norm() / std::max(jet.hess_phi[v].norm(), 1e-8), 1e-4);
      EXPECT_LT(std::abs((A.cwiseProduct(jet.hess_phi[v])).sum()) / (A.norm() * jet.hess_phi[v].norm() + 1e-300),
                1e-6);
      EXPECT_LT((jet.hess_phi[v] - jet.hess_phi[v].transpose()).norm(), 1e-12 * jet.hess_phi[v].norm() + 1e-300);
    }
  }
}

}  // namespace

TEST(AnisoKernels, JetDerivativesMatchFiniteDifferences) {
  Rng rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    Cage<2> c2 = random_polygon(rng, 6 + trial, trial % 2);
    KernelContext<2> k2(random_spd2(rng), c2);
    for (const auto& p : sample_interior_points(c2, 2, trial)) check_jet_derivatives(k2, p, 1e-5 * c2.bbox_diagonal());
  }
  Cage<3> c3 = perturbed_sphere_cage(rng, 0, 0.2);
  KernelContext<3> k3(random_spd3(rng), c3);
  for (const auto& p : sample_interior_points(c3, 3, 1)) check_jet_derivatives(k3, p, 1e-5 * c3.bbox_diagonal());
}
