#pragma once

#include "anigreen/cage.hpp"
#include "anigreen/kernels.hpp"
#include "anigreen/spd.hpp"

#include <Eigen/Core>
#include <functional>

namespace anigreen {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Integrand writes `out` (preallocated, ncomp entries) for a point x on the
/// simplex with barycentric coordinates `bary` relative to the whole simplex.
template <int D>
using SimplexIntegrand = std::function<void(const Vec<D>& x, const Vec<D>& bary, Eigen::Ref<Eigen::VectorXd> out)>;

struct QuadratureOptions {
  double rel_tol = 1e-12;
  int max_depth = 24;
  int order = 16;
};

/// Adaptive integral over an edge (D = 2) or triangle (D = 3) with respect to
/// arc length / area. Edges are bisected, triangles split 4-way at the edge
/// midpoints, until a piece and its children agree to within the piece's share
/// of rel_tol times an L1 estimate. Throws NoConvergence past max_depth.
template <int D>
Eigen::VectorXd integrate_simplex(const Simplex<D>& simplex, int ncomp, const SimplexIntegrand<D>& f,
                                  const QuadratureOptions& opts = {});

enum class QuadKind { Psi, Phi };

/// psi and phi of one face at eta, integrating the anisotropic kernels
/// directly in source coordinates.
template <int D>
struct OracleValues {
  double psi = 0.0;
  Vec<D> phi = Vec<D>::Zero();
};

template <int D>
OracleValues<D> quadrature_face(const SpdMatrix<D>& a, const Cage<D>& cage, std::size_t face, const Vec<D>& eta,
                                double rel_tol = 1e-12);

/// Single value; `vertex` is the local vertex index, ignored for psi.
template <int D>
double quadrature_integral(QuadKind kind, const Cage<D>& cage, std::size_t face, int vertex,
                           const SpdMatrix<D>& a, const Vec<D>& eta, double rel_tol = 1e-12);

/// Closed form vs quadrature on every face at every point. Errors are
/// |closed - quad| / max(|quad|, floor), floor = 1e-8 times the largest
/// |quad| of the same kind at that point (guards values that cancel to ~0).
struct OracleReport {
  double max_rel_error = 0.0;
  double max_psi_error = 0.0;
  double max_phi_error = 0.0;
  std::size_t worst_point = 0;
  std::size_t worst_face = 0;
  std::size_t values = 0;
};

template <int D>
OracleReport compare_with_oracle(const KernelContext<D>& ctx, const PointList<D>& points, double rel_tol = 1e-12);

}  // namespace anigreen
