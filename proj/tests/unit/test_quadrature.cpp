#include "anigreen/coords.hpp"
#include "anigreen/error.hpp"
#include "anigreen/quadrature.hpp"
#include "anigreen/variational.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace anigreen;
using namespace anigreen::fixtures;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussRule& r = gauss_legendre(16);
  double sum = 0, x31 = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    sum += r.weights[i];
    x31 += r.weights[i] * std::pow(r.nodes[i], 31);
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(x31, 1.0 / 32.0, 1e-15);
}

TEST(IntegrateSimplex, ConstantOverUnitEdge) {
  Simplex<2> e = {Vec<2>(0, 0), Vec<2>(1, 0)};
  auto r = integrate_simplex<2>(e, 1, [](const Vec<2>&, const Vec<2>&, Eigen::Ref<Eigen::VectorXd> out) { out(0) = 1; });
  EXPECT_NEAR(r(0), 1.0, 1e-15);
}

TEST(IntegrateSimplex, TriangleMoments) {
  Simplex<3> t = {Vec<3>(0, 0, 0), Vec<3>(2, 0, 0), Vec<3>(0, 1, 0)};
  auto r = integrate_simplex<3>(t, 3, [](const Vec<3>& x, const Vec<3>& bary, Eigen::Ref<Eigen::VectorXd> out) {
    out(0) = 1;
    out(1) = x.x();
    out(2) = bary(0);
  });
  EXPECT_NEAR(r(0), 1.0, 1e-14);
  EXPECT_NEAR(r(1), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(r(2), 1.0 / 3.0, 1e-14);
}

TEST(IntegrateSimplex, RejectsTooTightTolerance) {
  Spd2 a = Spd2::identity();
  Cage<2> c = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_THROW(quadrature_face(a, c, 0, Vec<2>(0.5, 0.5), 1e-14), Error);
}

TEST(Quadrature, UnitEdgePsiMatchesLogIntegral) {
  // -(1/2pi) int_0^1 log|x - y| dx at y = (0.5, 0.5):
  // int log sqrt((x-.5)^2 + .25) = [u log(u^2+.25)/2 - u + .5 atan(2u)] over u in [-.5, .5]
  const double half = 0.5 * std::log(0.5) / 2.0 - 0.5 + 0.5 * std::atan(1.0);
  const double expected = -(2.0 * half) / (2.0 * kPi);
  Simplex<2> e = {Vec<2>(0, 0), Vec<2>(1, 0)};
  EXPECT_NEAR(iso_psi<2>(e, Vec<2>(0.5, 0.5)), expected, 1e-14);
  Cage<2> c = Cage<2>::validate({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_NEAR(quadrature_integral(QuadKind::Psi, c, 0, 0, Spd2::identity(), Vec<2>(0.5, 0.5)), expected, 1e-13);
  // reflection symmetry across the edge line
  EXPECT_NEAR(iso_psi<2>(e, Vec<2>(0.3, 0.7)), iso_psi<2>(e, Vec<2>(0.3, -0.7)), 1e-15);
}

TEST(Quadrature, PoissonKernelSumsToOne) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    Cage<2> c = random_polygon(rng, 7, false);
    Spd2 a = random_spd2(rng);
    for (const auto& p : sample_interior_points(c, 2, trial)) {
      double total = 0;
      for (std::size_t f = 0; f < c.num_faces(); ++f) total += quadrature_face(a, c, f, p).phi.sum();
      EXPECT_NEAR(total, 1.0, 1e-10);
    }
  }
  Cage<3> c3 = l_prism_cage();
  Spd3 a3 = random_spd3(rng);
  for (const auto& p : sample_interior_points(c3, 2, 1)) {
    double total = 0;
    for (std::size_t f = 0; f < c3.num_faces(); ++f) total += quadrature_face(a3, c3, f, p).phi.sum();
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Quadrature, FaceSumOfPhiIsTheUnweightedKernelIntegral) {
  Simplex<3> t = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0)};
  const Vec<3> y(0.3, 0.2, 0.4);
  // solid angle divided by 4 pi, integrated directly
  auto r = integrate_simplex<3>(t, 1, [&](const Vec<3>& x, const Vec<3>&, Eigen::Ref<Eigen::VectorXd> out) {
    const Vec<3> d = x - y;
    out(0) = d.z() / (4 * kPi * std::pow(d.norm(), 3));
  });
  EXPECT_NEAR(iso_face_jet<3>(t, y).phi.sum(), r(0), 1e-12);
}

TEST(Quadrature, ScalingLaws) {
  Rng rng(13);
  Cage<3> c = cube_cage();
  Spd3 a = random_spd3(rng);
  Spd3 a2 = Spd3::validate(2.0 * a.entries());
  KernelContext<3> k1(a, c), k2(a2, c);
  const Vec<3> eta(0.1, -0.2, 0.3);
  for (std::size_t f = 0; f < c.num_faces(); ++f) {
    // phi is invariant under A -> cA; psi scales by 1/c in 3D
    EXPECT_NEAR(aniso_psi(k2, f, eta), aniso_psi(k1, f, eta) / 2.0, 1e-14);
    for (int v = 0; v < 3; ++v) EXPECT_NEAR(aniso_phi(k2, f, v, eta), aniso_phi(k1, f, v, eta), 1e-14);
    EXPECT_NEAR(quadrature_face(a2, c, f, eta).psi, quadrature_face(a, c, f, eta).psi / 2.0, 1e-12);
  }
}

TEST(Quadrature, IdentityContextIsIsotropic) {
  Cage<3> c = icosphere_cage(1);
  KernelContext<3> k(Spd3::identity(), c);
  const Vec<3> eta(0.1, 0.2, -0.3);
  for (std::size_t f = 0; f < c.num_faces(); ++f) {
    Simplex<3> s;
    for (int v = 0; v < 3; ++v) s[v] = c.vertex(c.face(f)[v]);
    FaceJet<3> iso = iso_face_jet<3>(s, eta);
    EXPECT_NEAR(aniso_psi(k, f, eta), iso.psi, 1e-15);
    for (int v = 0; v < 3; ++v) EXPECT_NEAR(aniso_phi(k, f, v, eta), iso.phi(v), 1e-15);
  }
}

TEST(Quadrature, OracleReportOnRandomCases) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    Cage<2> c = random_polygon(rng, 4 + 3 * trial, trial % 2);
    KernelContext<2> k(random_spd2(rng), c);
    OracleReport r = compare_with_oracle(k, sample_interior_points(c, 10, trial, 0.01));
    EXPECT_LT(r.max_rel_error, 1e-6);
    EXPECT_EQ(r.values, 10 * c.num_faces() * 3);
  }
}
