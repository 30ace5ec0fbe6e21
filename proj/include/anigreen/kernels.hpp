#pragma once

#include "anigreen/cage.hpp"
#include "anigreen/spd.hpp"
#include "anigreen/types.hpp"

#include <array>
#include <vector>

namespace anigreen {

/// G_A(xi, eta). Throws CoincidentPoints when xi and eta are closer than
/// 1e-12 * max(1, |xi|, |eta|).
template <int D>
double fundamental_solution(const SpdMatrix<D>& a, const Vec<D>& xi, const Vec<D>& eta);

/// Gradient of G_A with respect to xi.
template <int D>
Vec<D> fundamental_gradient(const SpdMatrix<D>& a, const Vec<D>& xi, const Vec<D>& eta);

template <int D>
using Simplex = std::array<Vec<D>, D>;

/// Per-face contributions and their derivatives with respect to the query
/// point. phi(k) belongs to the k-th vertex of the face.
template <int D>
struct FaceJet {
  double psi = 0.0;
  Vec<D> phi = Vec<D>::Zero();
  Vec<D> grad_psi = Vec<D>::Zero();
  std::array<Vec<D>, D> grad_phi{};
  Mat<D> hess_psi = Mat<D>::Zero();
  std::array<Mat<D>, D> hess_phi{};
};

// 0: values only, 1: + gradients, 2: + Hessians.
enum class JetOrder { Value = 0, Gradient = 1, Hessian = 2 };

/// Isotropic closed forms for one face at y: psi = -int G, phi_k = int hat_k dG/dn.
/// Throws SingularConfiguration when y lies on the face.
template <int D>
FaceJet<D> iso_face_jet(const Simplex<D>& face, const Vec<D>& y, JetOrder order = JetOrder::Value);

template <int D>
double iso_psi(const Simplex<D>& face, const Vec<D>& y) {
  return iso_face_jet<D>(face, y).psi;
}

template <int D>
double iso_phi(const Simplex<D>& face, int local_vertex, const Vec<D>& y) {
  return iso_face_jet<D>(face, y).phi(local_vertex);
}

/// Cached pullback of a source cage by A^{-1/2}.
template <int D>
class KernelContext {
 public:
  KernelContext(const SpdMatrix<D>& a, const Cage<D>& cage);

  const SpdMatrix<D>& matrix() const { return a_; }
  const Cage<D>& source() const { return source_; }
  const Cage<D>& pulled_cage() const { return pulled_; }
  // 1 / sqrt(n_j^T A n_j).
  const std::vector<double>& neumann_rescale() const { return rescale_; }
  static constexpr double omega() { return unit_sphere_area<D>(); }

  Simplex<D> pulled_face(std::size_t face) const;
  Vec<D> pull(const Vec<D>& eta) const { return a_.inv_sqrt() * eta; }

  /// Anisotropic contributions of one face at eta (source coordinates),
  /// derivatives taken with respect to eta.
  FaceJet<D> face_jet(std::size_t face, const Vec<D>& eta, JetOrder order = JetOrder::Value) const;

 private:
  SpdMatrix<D> a_;
  Cage<D> source_;
  Cage<D> pulled_;
  std::vector<double> rescale_;
};

template <int D>
double aniso_psi(const KernelContext<D>& ctx, std::size_t face, const Vec<D>& eta) {
  return ctx.face_jet(face, eta).psi;
}

template <int D>
double aniso_phi(const KernelContext<D>& ctx, std::size_t face, int local_vertex, const Vec<D>& eta) {
  return ctx.face_jet(face, eta).phi(local_vertex);
}

}  // namespace anigreen
