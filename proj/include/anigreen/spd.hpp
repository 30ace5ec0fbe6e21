#pragma once

#include "anigreen/types.hpp"

#include <array>
#include <optional>

namespace anigreen {

struct AnisoParams2D {
  double theta = 0.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

// Rotation P = Rz(alpha) * Ry(beta) * Rx(gamma).
struct AnisoParams3D {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Symmetric positive definite coefficient matrix with its spectral data.
///
/// Instances are only produced by validate() or the parameter builders, so
/// every SpdMatrix in circulation satisfies the SPD invariants. Immutable.
template <int D>
class SpdMatrix {
 public:
  static_assert(D == 2 || D == 3);

  /// Symmetrizes round-off asymmetry (<= 1e-9 relative), then eigendecomposes.
  /// Throws NotSymmetric or NotPositiveDefinite.
  static SpdMatrix validate(const Mat<D>& m);

  /// A = P diag(lambdas) P^T with P orthogonal. Throws NonPositiveEigenvalue.
  static SpdMatrix from_spectrum(const Mat<D>& rotation, const Vec<D>& lambdas);

  static SpdMatrix identity() { return from_spectrum(Mat<D>::Identity(), Vec<D>::Ones()); }

  const Mat<D>& entries() const { return entries_; }
  // Descending.
  const Vec<D>& eigenvalues() const { return eig_values_; }
  // Columns are the eigenvectors matching eigenvalues().
  const Mat<D>& eigenvectors() const { return eig_vectors_; }
  const Mat<D>& sqrt() const { return sqrt_; }
  const Mat<D>& inv_sqrt() const { return inv_sqrt_; }
  const Mat<D>& inverse() const { return inverse_; }
  double det() const { return det_; }
  double condition_number() const { return eig_values_(0) / eig_values_(D - 1); }

 private:
  SpdMatrix(const Mat<D>& entries, const Mat<D>& vectors, const Vec<D>& values);

  Mat<D> entries_;
  Vec<D> eig_values_;
  Mat<D> eig_vectors_;
  Mat<D> sqrt_;
  Mat<D> inv_sqrt_;
  Mat<D> inverse_;
  double det_ = 1.0;
};

using Spd2 = SpdMatrix<2>;
using Spd3 = SpdMatrix<3>;

Spd2 build_2d(const AnisoParams2D& params);
Spd3 build_3d(const AnisoParams3D& params);

Mat<2> rotation_2d(double theta);
Mat<3> rotation_zyx(double alpha, double beta, double gamma);

/// How a matrix was specified: explicit entries, or eigenvalues plus
/// rotation angles (theta in 2D; alpha, beta, gamma in 3D).
template <int D>
struct MatrixSpec {
  std::optional<Mat<D>> entries;
  Vec<D> lambdas = Vec<D>::Ones();
  std::array<double, D == 2 ? 1 : 3> angles{};

  static MatrixSpec identity() { return {}; }
  bool is_identity() const;
};

template <int D>
SpdMatrix<D> build_matrix(const MatrixSpec<D>& spec);

/// Symmetric eigendecomposition, eigenvalues descending. Closed form for 2x2,
/// cyclic Jacobi sweeps (off-diagonal tolerance 1e-14) for 3x3.
template <int D>
void symmetric_eigen(const Mat<D>& m, Vec<D>& values, Mat<D>& vectors);

}  // namespace anigreen
