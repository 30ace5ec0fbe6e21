#pragma once

#include "anigreen/coords.hpp"
#include "anigreen/differentials.hpp"

#include <Eigen/Cholesky>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace anigreen {

template <int D>
struct PositionalConstraint {
  Vec<D> source;  // q_i, interior
  Vec<D> target;  // f_i
};

struct VariationalWeights {
  double lambda1 = 100.0;  // positional
  double lambda2 = 10.0;   // Hessian smoothness
  double lambda3 = 0.1;    // pull towards the source coefficients
};

struct SolverOptions {
  int max_iters = 200;
  double rel_tol = 1e-8;
  // lambda3 is raised to this floor unless disabled, so the global step is
  // always uniquely solvable.
  double lambda3_floor = 1e-6;
  bool enforce_lambda3_floor = true;
};

template <int D>
struct HessianSampling {
  PointList<D> points;
  std::vector<std::size_t> discarded;  // candidate indices that failed the interior test
  std::size_t candidates = 0;
};

/// Per face, `per_face` points at uniform barycentric positions pushed inward
/// along the face normal by offset * bbox diagonal. Throws NoValidSamples
/// when every candidate fails the interior test.
template <int D>
HessianSampling<D> sample_hessian_points(const Cage<D>& cage, int per_face, double offset,
                                         const InteriorPolicy& policy = {});

/// Seeded uniform rejection sampling of interior points with clearance
/// `clearance * bbox diagonal`.
template <int D>
PointList<D> sample_interior_points(const Cage<D>& cage, std::size_t count, std::uint64_t seed,
                                    double clearance = 0.02);

template <int D>
struct VariationalProblem {
  Cage<D> cage;
  SpdMatrix<D> matrix;
  PointList<D> arap_points;  // empty selects the seeded fallback set
  std::vector<PositionalConstraint<D>> constraints;
  PointList<D> hessian_points;
  VariationalWeights weights;
  SolverOptions solver;
  std::uint64_t seed = 0;
  std::size_t fallback_arap_count = 32;
};

template <int D>
struct VariationalState {
  RowMatrix a;  // n_vertices x D
  RowMatrix b;  // n_faces x D
  std::vector<Mat<D>> rotations;
  std::vector<double> energy_trace;
  int iterations = 0;
  bool converged = false;
  PointList<D> arap_points;  // the samples actually used
};

/// Closest rotation to m (SVD, reflection removed by flipping the direction
/// of the smallest singular value).
template <int D>
Mat<D> closest_rotation(const Mat<D>& m);

/// Local-global minimization of ARAP + positional + Hessian + regularization.
template <int D>
class VariationalSolver {
 public:
  explicit VariationalSolver(VariationalProblem<D> problem);

  const VariationalProblem<D>& problem() const { return problem_; }
  const KernelContext<D>& context() const { return ctx_; }

  VariationalState<D> solve() const;

  /// Rotations minimizing the ARAP term for fixed coefficients.
  std::vector<Mat<D>> local_step(const RowMatrix& coeffs) const;
  /// Exact minimizer over the coefficients for fixed rotations.
  RowMatrix global_step(const std::vector<Mat<D>>& rotations) const;
  double energy(const RowMatrix& coeffs, const std::vector<Mat<D>>& rotations) const;

  const RowMatrix& system_matrix() const { return m_; }
  RowMatrix right_hand_side(const std::vector<Mat<D>>& rotations) const;
  RowMatrix initial_coefficients() const { return x0_; }
  double effective_lambda3() const { return lambda3_; }

 private:
  VariationalProblem<D> problem_;
  KernelContext<D> ctx_;
  DifferentialTable<D> arap_;
  RowMatrix m_;    // weighted stacked rows
  RowMatrix fixed_rhs_;  // rhs rows that do not depend on the rotations
  RowMatrix x0_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lambda3_ = 0.0;
  Eigen::Index arap_rows_ = 0;
};

/// f(eta) = sum a_v phi_v + sum b_t psi_t at the points.
template <int D>
PointList<D> evaluate_map(const KernelContext<D>& ctx, const RowMatrix& a, const RowMatrix& b,
                          const PointList<D>& points, const InteriorPolicy& policy = {});

/// n_t = A^{-1} b_t.
template <int D>
PointList<D> recovered_normals(const SpdMatrix<D>& matrix, const RowMatrix& b);

}  // namespace anigreen
