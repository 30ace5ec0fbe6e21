#include "anigreen/differentials.hpp"

#include "anigreen/error.hpp"
#include "anigreen/parallel.hpp"

namespace anigreen {

template <int D>
DifferentialTable<D> compute_differentials(const KernelContext<D>& ctx, const PointList<D>& samples,
                                           bool with_hessians, const InteriorPolicy& policy) {
  const Cage<D>& cage = ctx.source();
  constexpr int S = kSymSize<D>;
  const auto n = Eigen::Index(cage.num_vertices()), m = Eigen::Index(cage.num_faces());
  const auto k = Eigen::Index(samples.size());
  DifferentialTable<D> t;
  t.samples = enforce_interior(cage, samples, policy);
  t.has_hessians = with_hessians;
  t.grad_phi = RowMatrix::Zero(D * k, n);
  t.grad_psi = RowMatrix::Zero(D * k, m);
  if (with_hessians) {
    t.hess_phi = RowMatrix::Zero(S * k, n);
    t.hess_psi = RowMatrix::Zero(S * k, m);
  }
  const JetOrder order = with_hessians ? JetOrder::Hessian : JetOrder::Gradient;
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto r = Eigen::Index(i);
    for (std::size_t j = 0; j < cage.num_faces(); ++j) {
      FaceJet<D> jet = ctx.face_jet(j, t.samples[i], order);
      const auto& f = cage.face(j);
      t.grad_psi.block(D * r, j, D, 1) = jet.grad_psi;
      for (int v = 0; v < D; ++v) t.grad_phi.block(D * r, f[v], D, 1) += jet.grad_phi[v];
      if (with_hessians) {
        t.hess_psi.block(S * r, j, S, 1) = flatten_sym<D>(jet.hess_psi);
        for (int v = 0; v < D; ++v) t.hess_phi.block(S * r, f[v], S, 1) += flatten_sym<D>(jet.hess_phi[v]);
      }
    }
  });
  return t;
}

template <int D>
Vec<D> grad_psi(const KernelContext<D>& ctx, std::size_t face, const Vec<D>& eta) {
  return ctx.face_jet(face, eta, JetOrder::Gradient).grad_psi;
}

template <int D>
SymVec<D> hess_psi(const KernelContext<D>& ctx, std::size_t face, const Vec<D>& eta) {
  return flatten_sym<D>(ctx.face_jet(face, eta, JetOrder::Hessian).hess_psi);
}

template <int D>
Vec<D> grad_phi(const KernelContext<D>& ctx, std::size_t vertex, const Vec<D>& eta) {
  Vec<D> g = Vec<D>::Zero();
  const Cage<D>& cage = ctx.source();
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const auto& f = cage.face(j);
    for (int v = 0; v < D; ++v)
      if (std::size_t(f[v]) == vertex) g += ctx.face_jet(j, eta, JetOrder::Gradient).grad_phi[v];
  }
  return g;
}

template <int D>
SymVec<D> hess_phi(const KernelContext<D>& ctx, std::size_t vertex, const Vec<D>& eta) {
  Mat<D> h = Mat<D>::Zero();
  const Cage<D>& cage = ctx.source();
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const auto& f = cage.face(j);
    for (int v = 0; v < D; ++v)
      if (std::size_t(f[v]) == vertex) h += ctx.face_jet(j, eta, JetOrder::Hessian).hess_phi[v];
  }
  return flatten_sym<D>(h);
}

template <int D>
RowMatrix jacobian_rows(const DifferentialTable<D>& table, std::size_t sample) {
  const auto n = table.grad_phi.cols(), m = table.grad_psi.cols();
  RowMatrix rows(D, n + m);
  rows << table.grad_phi.middleRows(D * sample, D), table.grad_psi.middleRows(D * sample, D);
  return rows;
}

template <int D>
RowMatrix hessian_rows(const DifferentialTable<D>& table, std::size_t sample) {
  if (!table.has_hessians) throw Error(ErrorCode::InvalidArgument, "differential table was built without Hessians");
  constexpr int S = kSymSize<D>;
  const auto n = table.hess_phi.cols(), m = table.hess_psi.cols();
  RowMatrix rows(S, n + m);
  rows << table.hess_phi.middleRows(S * sample, S), table.hess_psi.middleRows(S * sample, S);
  return rows;
}

template <int D>
Mat<D> map_jacobian(const DifferentialTable<D>& table, std::size_t sample, const RowMatrix& coeffs) {
  Mat<D> jt = jacobian_rows(table, sample) * coeffs;
  return jt.transpose();
}

template <int D>
Eigen::Matrix<double, kSymSize<D>, D> map_hessian(const DifferentialTable<D>& table, std::size_t sample,
                                                  const RowMatrix& coeffs) {
  return hessian_rows(table, sample) * coeffs;
}

RowMatrix stack_coefficients(const RowMatrix& a, const RowMatrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::InvalidArgument, "coefficient blocks differ in width");
  RowMatrix x(a.rows() + b.rows(), a.cols());
  x << a, b;
  return x;
}

#define ANIGREEN_INSTANTIATE(D)                                                                                    \
  template DifferentialTable<D> compute_differentials(const KernelContext<D>&, const PointList<D>&, bool,          \
                                                      const InteriorPolicy&);                                     \
  template Vec<D> grad_psi(const KernelContext<D>&, std::size_t, const Vec<D>&);                                   \
  template SymVec<D> hess_psi(const KernelContext<D>&, std::size_t, const Vec<D>&);                                \
  template Vec<D> grad_phi(const KernelContext<D>&, std::size_t, const Vec<D>&);                                   \
  template SymVec<D> hess_phi(const KernelContext<D>&, std::size_t, const Vec<D>&);                                \
  template RowMatrix jacobian_rows(const DifferentialTable<D>&, std::size_t);                                      \
  template RowMatrix hessian_rows(const DifferentialTable<D>&, std::size_t);                                       \
  template Mat<D> map_jacobian(const DifferentialTable<D>&, std::size_t, const RowMatrix&);                        \
  template Eigen::Matrix<double, kSymSize<D>, D> map_hessian(const DifferentialTable<D>&, std::size_t, const RowMatrix&);

ANIGREEN_INSTANTIATE(2)
ANIGREEN_INSTANTIATE(3)

}  // namespace anigreen
