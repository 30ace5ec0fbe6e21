#include "anigreen/variational.hpp"

#include "anigreen/error.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <string>

namespace anigreen {

template <int D>
HessianSampling<D> sample_hessian_points(const Cage<D>& cage, int per_face, double offset,
                                         const InteriorPolicy& policy) {
  if (per_face < 1) throw Error(ErrorCode::InvalidArgument, "per_face must be positive");
  if (!(offset > 0.0 && offset <= 0.1)) throw Error(ErrorCode::InvalidArgument, "offset must lie in (0, 0.1]");
  const double push = offset * cage.bbox_diagonal();
  const double eps = policy.resolve(cage.bbox_diagonal());

  std::vector<Vec<D>> bary;
  if constexpr (D == 2) {
    for (int k = 0; k < per_face; ++k) {
      double t = (k + 0.5) / per_face;
      bary.push_back(Vec<2>(1 - t, t));
    }
  } else {
    // Centroids of the level-L split into L^2 sub-triangles, thinned evenly.
    int level = int(std::ceil(std::sqrt(double(per_face))));
    std::vector<Vec<3>> lattice;
    for (int i = 0; i < level; ++i)
      for (int j = 0; i + j < level; ++j) {
        lattice.push_back(Vec<3>(level - i - j - 2.0 / 3, i + 1.0 / 3, j + 1.0 / 3) / level);
        if (i + j + 1 < level) lattice.push_back(Vec<3>(level - i - j - 4.0 / 3, i + 2.0 / 3, j + 2.0 / 3) / level);
      }
    for (int k = 0; k < per_face; ++k) {
      std::size_t idx = std::size_t((k + 0.5) * double(lattice.size()) / per_face);
      bary.push_back(lattice[idx]);
    }
  }

  HessianSampling<D> out;
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const auto& f = cage.face(j);
    for (const auto& b : bary) {
      Vec<D> p = -push * cage.normal(j);
      for (int k = 0; k < D; ++k) p += b(k) * cage.vertex(f[k]);
      if (is_interior(cage, p, eps))
        out.points.push_back(p);
      else
        out.discarded.push_back(out.candidates);
      ++out.candidates;
    }
  }
  if (out.points.empty()) throw Error(ErrorCode::NoValidSamples, "no Hessian sample survived the interior test");
  return out;
}

template <int D>
PointList<D> sample_interior_points(const Cage<D>& cage, std::size_t count, std::uint64_t seed, double clearance) {
  std::mt19937_64 rng(seed);
  const Vec<D> lo = cage.bbox_min(), hi = cage.bbox_max();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eps = clearance * cage.bbox_diagonal();
  PointList<D> pts;
  const std::size_t budget = 10000 * std::max<std::size_t>(count, 1);
  for (std::size_t tries = 0; pts.size() < count && tries < budget; ++tries) {
    Vec<D> p;
    for (int k = 0; k < D; ++k) p(k) = lo(k) + unit(rng) * (hi(k) - lo(k));
    if (is_interior(cage, p, eps)) pts.push_back(p);
  }
  if (pts.size() < count) throw Error(ErrorCode::NoValidSamples, "rejection sampling found too few interior points");
  return pts;
}

template <int D>
Mat<D> closest_rotation(const Mat<D>& m) {
  Eigen::JacobiSVD<Mat<D>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat<D> u = svd.matrixU();
  const Mat<D>& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(D - 1) *= -1.0;
  return u * v.transpose();
}

template <int D>
VariationalSolver<D>::VariationalSolver(VariationalProblem<D> problem)
    : problem_(std::move(problem)), ctx_(problem_.matrix, problem_.cage) {
  auto& p = problem_;
  const auto& w = p.weights;
  if (w.lambda1 < 0 || w.lambda2 < 0 || w.lambda3 < 0)
    throw Error(ErrorCode::InvalidArgument, "variational weights must be non-negative");
  if (!p.constraints.empty() && !(w.lambda1 > 0))
    throw Error(ErrorCode::InvalidArgument, "lambda1 must be positive when constraints are given");
  if (p.solver.max_iters < 1 || !(p.solver.rel_tol > 0))
    throw Error(ErrorCode::InvalidArgument, "solver needs max_iters >= 1 and rel_tol > 0");
  lambda3_ = w.lambda3;
  if (p.solver.enforce_lambda3_floor) lambda3_ = std::max(lambda3_, p.solver.lambda3_floor);
  if (p.arap_points.empty()) p.arap_points = sample_interior_points(p.cage, p.fallback_arap_count, p.seed);

  const Cage<D>& cage = p.cage;
  const auto n = Eigen::Index(cage.num_vertices()), mf = Eigen::Index(cage.num_faces());
  const Eigen::Index cols = n + mf;
  constexpr int S = kSymSize<D>;

  arap_ = compute_differentials(ctx_, p.arap_points, false);
  PointList<D> q;
  for (const auto& c : p.constraints) q.push_back(c.source);
  CoordinateTable<D> qt;
  if (!q.empty()) qt = compute_coords(ctx_, q);
  DifferentialTable<D> ht;
  const bool use_hess = w.lambda2 > 0 && !p.hessian_points.empty();
  if (use_hess) ht = compute_differentials(ctx_, p.hessian_points, true);

  arap_rows_ = Eigen::Index(D * p.arap_points.size());
  const Eigen::Index con_rows = Eigen::Index(q.size());
  const Eigen::Index hess_rows = use_hess ? Eigen::Index(S * p.hessian_points.size()) : 0;
  const Eigen::Index reg_rows = lambda3_ > 0 ? cols : 0;
  const Eigen::Index rows = arap_rows_ + con_rows + hess_rows + reg_rows;

  x0_.resize(cols, D);
  for (Eigen::Index i = 0; i < n; ++i) x0_.row(i) = cage.vertex(i).transpose();
  for (Eigen::Index j = 0; j < mf; ++j) x0_.row(n + j) = (p.matrix.entries() * cage.normal(j)).transpose();

  m_ = RowMatrix::Zero(rows, cols);
  fixed_rhs_ = RowMatrix::Zero(rows, D);
  Eigen::Index r = 0;
  m_.topRows(arap_rows_) << arap_.grad_phi, arap_.grad_psi;
  r += arap_rows_;
  if (con_rows > 0) {
    const double s1 = std::sqrt(w.lambda1);
    m_.middleRows(r, con_rows) << s1 * qt.phi, s1 * qt.psi;
    for (Eigen::Index i = 0; i < con_rows; ++i) fixed_rhs_.row(r + i) = s1 * p.constraints[i].target.transpose();
    r += con_rows;
  }
  if (hess_rows > 0) {
    const double s2 = std::sqrt(w.lambda2);
    auto order = flatten_order<D>();
    m_.middleRows(r, hess_rows) << ht.hess_phi, ht.hess_psi;
    for (Eigen::Index i = 0; i < hess_rows; ++i) {
      const auto& e = order[i % S];
      m_.row(r + i) *= s2 * (e.first == e.second ? 1.0 : std::sqrt(2.0));
    }
    r += hess_rows;
  }
  if (reg_rows > 0) {
    const double s3 = std::sqrt(lambda3_);
    m_.middleRows(r, cols) = s3 * RowMatrix::Identity(cols, cols);
    fixed_rhs_.middleRows(r, cols) = s3 * x0_;
  }

  Eigen::MatrixXd normal = m_.transpose() * m_;
  llt_.compute(normal);
  bool ok = llt_.info() == Eigen::Success;
  if (ok) {
    Eigen::VectorXd piv = Eigen::MatrixXd(llt_.matrixL()).diagonal();
    ok = piv.minCoeff() > 0 && piv.cwiseAbs2().minCoeff() > 1e-13 * normal.diagonal().maxCoeff();
  }
  if (!ok) throw Error(ErrorCode::SingularSystem, "global step normal matrix is singular (lambda3 = 0 with rank-deficient rows)");
}

template <int D>
RowMatrix VariationalSolver<D>::right_hand_side(const std::vector<Mat<D>>& rotations) const {
  RowMatrix rhs = fixed_rhs_;
  for (std::size_t i = 0; i < rotations.size(); ++i) rhs.middleRows(D * i, D) = rotations[i].transpose();
  return rhs;
}

template <int D>
std::vector<Mat<D>> VariationalSolver<D>::local_step(const RowMatrix& coeffs) const {
  std::vector<Mat<D>> rot(arap_.num_samples());
  for (std::size_t i = 0; i < rot.size(); ++i) rot[i] = closest_rotation<D>(map_jacobian(arap_, i, coeffs));
  return rot;
}

template <int D>
RowMatrix VariationalSolver<D>::global_step(const std::vector<Mat<D>>& rotations) const {
  RowMatrix rhs = m_.transpose() * right_hand_side(rotations);
  RowMatrix x(rhs.rows(), D);
  for (int c = 0; c < D; ++c) x.col(c) = llt_.solve(Eigen::VectorXd(rhs.col(c)));
  return x;
}

template <int D>
double VariationalSolver<D>::energy(const RowMatrix& coeffs, const std::vector<Mat<D>>& rotations) const {
  return (m_ * coeffs - right_hand_side(rotations)).squaredNorm();
}

template <int D>
VariationalState<D> VariationalSolver<D>::solve() const {
  constexpr double kZeroEnergy = 1e-18;
  VariationalState<D> st;
  st.arap_points = problem_.arap_points;
  RowMatrix x = x0_;
  auto rot = local_step(x);
  double e = energy(x, rot);
  st.energy_trace.push_back(e);
  st.iterations = 1;
  st.converged = e <= kZeroEnergy;
  while (!st.converged && st.iterations < problem_.solver.max_iters) {
    x = global_step(rot);
    st.energy_trace.push_back(energy(x, rot));
    rot = local_step(x);
    double e_new = energy(x, rot);
    st.energy_trace.push_back(e_new);
    ++st.iterations;
    st.converged = e_new <= kZeroEnergy || (e - e_new) <= problem_.solver.rel_tol * e;
    e = e_new;
  }
  const auto n = Eigen::Index(problem_.cage.num_vertices());
  st.a = x.topRows(n);
  st.b = x.bottomRows(x.rows() - n);
  st.rotations = std::move(rot);
  return st;
}

template <int D>
PointList<D> evaluate_map(const KernelContext<D>& ctx, const RowMatrix& a, const RowMatrix& b,
                          const PointList<D>& points, const InteriorPolicy& policy) {
  return apply_coefficients(compute_coords(ctx, points, policy), a, b);
}

template <int D>
PointList<D> recovered_normals(const SpdMatrix<D>& matrix, const RowMatrix& b) {
  PointList<D> out(b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) out[j] = matrix.inverse() * Vec<D>(b.row(j).transpose());
  return out;
}

#define ANIGREEN_INSTANTIATE(D)                                                                                 \
  template HessianSampling<D> sample_hessian_points(const Cage<D>&, int, double, const InteriorPolicy&);       \
  template PointList<D> sample_interior_points(const Cage<D>&, std::size_t, std::uint64_t, double);            \
  template Mat<D> closest_rotation<D>(const Mat<D>&);                                                           \
  template class VariationalSolver<D>;                                                                          \
  template PointList<D> evaluate_map(const KernelContext<D>&, const RowMatrix&, const RowMatrix&,               \
                                     const PointList<D>&, const InteriorPolicy&);                               \
  template PointList<D> recovered_normals(const SpdMatrix<D>&, const RowMatrix&);

ANIGREEN_INSTANTIATE(2)
ANIGREEN_INSTANTIATE(3)

}  // namespace anigreen
