#pragma once

#include "anigreen/containment.hpp"
#include "anigreen/kernels.hpp"

#include <array>
#include <utility>

namespace anigreen {

/// Symmetric Hessian flatten order: (0,0),(0,1),(1,1) in 2D;
/// (0,0),(0,1),(0,2),(1,1),(1,2),(2,2) in 3D.
template <int D>
constexpr std::array<std::pair<int, int>, kSymSize<D>> flatten_order() {
  if constexpr (D == 2)
    return {{{0, 0}, {0, 1}, {1, 1}}};
  else
    return {{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
}

template <int D>
SymVec<D> flatten_sym(const Mat<D>& m) {
  SymVec<D> v;
  auto order = flatten_order<D>();
  for (int k = 0; k < kSymSize<D>; ++k) v(k) = m(order[k].first, order[k].second);
  return v;
}

template <int D>
Mat<D> unflatten_sym(const SymVec<D>& v) {
  Mat<D> m;
  auto order = flatten_order<D>();
  for (int k = 0; k < kSymSize<D>; ++k) {
    m(order[k].first, order[k].second) = v(k);
    m(order[k].second, order[k].first) = v(k);
  }
  return m;
}

/// Gradients and flattened Hessians of all coordinate functions at a sample
/// set. Row blocks are per sample: grad_* has D rows per sample, hess_* has
/// kSymSize<D> rows per sample; columns are vertices (phi) or faces (psi).
template <int D>
struct DifferentialTable {
  PointList<D> samples;
  RowMatrix grad_phi;
  RowMatrix grad_psi;
  RowMatrix hess_phi;
  RowMatrix hess_psi;
  bool has_hessians = false;

  std::size_t num_samples() const { return samples.size(); }
};

template <int D>
DifferentialTable<D> compute_differentials(const KernelContext<D>& ctx, const PointList<D>& samples,
                                           bool with_hessians = true, const InteriorPolicy& policy = {});

template <int D>
Vec<D> grad_psi(const KernelContext<D>& ctx, std::size_t face, const Vec<D>& eta);
template <int D>
SymVec<D> hess_psi(const KernelContext<D>& ctx, std::size_t face, const Vec<D>& eta);
// Sum over the faces incident to the (global) vertex.
template <int D>
Vec<D> grad_phi(const KernelContext<D>& ctx, std::size_t vertex, const Vec<D>& eta);
template <int D>
SymVec<D> hess_phi(const KernelContext<D>& ctx, std::size_t vertex, const Vec<D>& eta);

/// (G_Phi | G_Psi) for one sample: D x (n + m), so that J^T = rows * [a; b].
template <int D>
RowMatrix jacobian_rows(const DifferentialTable<D>& table, std::size_t sample);

/// (H_Phi | H_Psi) for one sample: kSymSize<D> x (n + m).
template <int D>
RowMatrix hessian_rows(const DifferentialTable<D>& table, std::size_t sample);

/// J_f at a sample for coefficients [a; b] ((n + m) x D); J(c, d) = d f_c / d eta_d.
template <int D>
Mat<D> map_jacobian(const DifferentialTable<D>& table, std::size_t sample, const RowMatrix& coeffs);

/// Hessian of each map component at a sample: column c is flatten(H f_c).
template <int D>
Eigen::Matrix<double, kSymSize<D>, D> map_hessian(const DifferentialTable<D>& table, std::size_t sample,
                                                  const RowMatrix& coeffs);

/// Stacks vertex coefficients over face coefficients.
RowMatrix stack_coefficients(const RowMatrix& a, const RowMatrix& b);

}  // namespace anigreen
