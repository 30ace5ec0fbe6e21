#include "anigreen/spd.hpp"

#include "anigreen/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace anigreen {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kDefinitenessTol = 1e-12;
constexpr double kJacobiTol = 1e-14;

template <int D>
void sort_descending(Vec<D>& values, Mat<D>& vectors) {
  std::array<int, D> order;
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values(a) > values(b); });
  Vec<D> v;
  Mat<D> p;
  for (int i = 0; i < D; ++i) {
    v(i) = values(order[i]);
    p.col(i) = vectors.col(order[i]);
  }
  values = v;
  vectors = p;
}

void eigen_2x2(const Mat<2>& m, Vec<2>& values, Mat<2>& vectors) {
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  double hi = mean + radius;
  double lo = mean - radius;
  // recover the small eigenvalue from the determinant to avoid cancellation
  if (hi > 0.0 && lo > 0.0) lo = (a * c - b * b) / hi;
  const double angle = 0.5 * std::atan2(2.0 * b, a - c);
  values << hi, lo;
  vectors << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
}

void eigen_3x3(const Mat<3>& m, Vec<3>& values, Mat<3>& vectors) {
  Mat<3> a = 0.5 * (m + m.transpose());
  Mat<3> v = Mat<3>::Identity();
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)));
    if (off <= kJacobiTol * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < std::numeric_limits<double>::min()) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        Mat<3> rot = Mat<3>::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = rot.transpose() * a * rot;
        a(p, q) = a(q, p) = 0.0;
        v = v * rot;
      }
    }
  }
  values = a.diagonal();
  vectors = v;
}

}  // namespace

template <>
void symmetric_eigen<2>(const Mat<2>& m, Vec<2>& values, Mat<2>& vectors) {
  eigen_2x2(m, values, vectors);
  sort_descending<2>(values, vectors);
}

template <>
void symmetric_eigen<3>(const Mat<3>& m, Vec<3>& values, Mat<3>& vectors) {
  eigen_3x3(m, values, vectors);
  sort_descending<3>(values, vectors);
}

template <int D>
SpdMatrix<D>::SpdMatrix(const Mat<D>& entries, const Mat<D>& vectors, const Vec<D>& values)
    : entries_(entries), eig_values_(values), eig_vectors_(vectors) {
  const Vec<D> root = values.cwiseSqrt();
  sqrt_ = vectors * root.asDiagonal() * vectors.transpose();
  inv_sqrt_ = vectors * root.cwiseInverse().asDiagonal() * vectors.transpose();
  inverse_ = vectors * values.cwiseInverse().asDiagonal() * vectors.transpose();
  sqrt_ = 0.5 * (sqrt_ + sqrt_.transpose()).eval();
  inv_sqrt_ = 0.5 * (inv_sqrt_ + inv_sqrt_.transpose()).eval();
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  det_ = values.prod();
}

template <int D>
SpdMatrix<D> SpdMatrix<D>::validate(const Mat<D>& m) {
  if (!m.allFinite()) throw Error(ErrorCode::NotSymmetric, "matrix has non-finite entries");
  const double norm = m.norm();
  if (norm == 0.0) throw Error(ErrorCode::NotPositiveDefinite, "matrix is zero");
  const double asym = (m - m.transpose()).norm() / norm;
  if (asym > kSymmetryTol) {
    std::ostringstream msg;
    msg << "relative asymmetry " << asym << " exceeds " << kSymmetryTol;
    throw Error(ErrorCode::NotSymmetric, msg.str());
  }
  const Mat<D> sym = 0.5 * (m + m.transpose());
  Vec<D> values;
  Mat<D> vectors;
  symmetric_eigen<D>(sym, values, vectors);
  if (!(values(0) > 0.0) || values(D - 1) <= kDefinitenessTol * values(0)) {
    std::ostringstream msg;
    msg << "eigenvalues [";
    for (int i = 0; i < D; ++i) msg << (i ? ", " : "") << values(i);
    msg << "] are not all positive";
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }
  return SpdMatrix(sym, vectors, values);
}

template <int D>
SpdMatrix<D> SpdMatrix<D>::from_spectrum(const Mat<D>& rotation, const Vec<D>& lambdas) {
  for (int i = 0; i < D; ++i) {
    if (!(lambdas(i) > 0.0) || !std::isfinite(lambdas(i))) {
      std::ostringstream msg;
      msg << "lambda" << (i + 1) << " = " << lambdas(i) << " must be positive";
      throw Error(ErrorCode::NonPositiveEigenvalue, msg.str());
    }
  }
  Mat<D> entries = rotation * lambdas.asDiagonal() * rotation.transpose();
  entries = 0.5 * (entries + entries.transpose()).eval();
  Vec<D> values = lambdas;
  Mat<D> vectors = rotation;
  sort_descending<D>(values, vectors);
  return SpdMatrix(entries, vectors, values);
}

template class SpdMatrix<2>;
template class SpdMatrix<3>;

Mat<2> rotation_2d(double theta) {
  Mat<2> p;
  p << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return p;
}

Mat<3> rotation_zyx(double alpha, double beta, double gamma) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  Mat<3> rz, ry, rx;
  rz << ca, -sa, 0, sa, ca, 0, 0, 0, 1;
  // sign placement of the y rotation follows the published parameterization
  ry << cb, 0, -sb, 0, 1, 0, sb, 0, cb;
  rx << 1, 0, 0, 0, cg, -sg, 0, sg, cg;
  return rz * ry * rx;
}

Spd2 build_2d(const AnisoParams2D& params) {
  return Spd2::from_spectrum(rotation_2d(params.theta), Vec<2>(params.lambda1, params.lambda2));
}

Spd3 build_3d(const AnisoParams3D& params) {
  return Spd3::from_spectrum(rotation_zyx(params.alpha, params.beta, params.gamma),
                             Vec<3>(params.lambda1, params.lambda2, params.lambda3));
}

template <int D>
bool MatrixSpec<D>::is_identity() const {
  if (entries) return *entries == Mat<D>::Identity();
  return lambdas == Vec<D>::Ones();
}

template <int D>
SpdMatrix<D> build_matrix(const MatrixSpec<D>& spec) {
  if (spec.entries) return SpdMatrix<D>::validate(*spec.entries);
  if constexpr (D == 2)
    return build_2d({spec.angles[0], spec.lambdas(0), spec.lambdas(1)});
  else
    return build_3d({spec.lambdas(0), spec.lambdas(1), spec.lambdas(2), spec.angles[0], spec.angles[1], spec.angles[2]});
}

template struct MatrixSpec<2>;
template struct MatrixSpec<3>;
template SpdMatrix<2> build_matrix(const MatrixSpec<2>&);
template SpdMatrix<3> build_matrix(const MatrixSpec<3>&);

}  // namespace anigreen
