#include "anigreen/kernels.hpp"

#include "anigreen/error.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

namespace anigreen {

namespace {

template <int D>
double quadratic_form(const SpdMatrix<D>& a, const Vec<D>& xi, const Vec<D>& eta) {
  Vec<D> d = xi - eta;
  double scale = std::max({1.0, xi.norm(), eta.norm()});
  if (d.norm() <= 1e-12 * scale) throw Error(ErrorCode::CoincidentPoints, "coincident source and field points");
  return d.dot(a.inverse() * d);
}

// 2D -------------------------------------------------------------------------

Vec<2> grad_angle(const Vec<2>& w) {
  return Vec<2>(w.y(), -w.x()) / w.squaredNorm();
}

Mat<2> hess_angle(const Vec<2>& w) {
  double x = w.x(), y = w.y(), r4 = w.squaredNorm() * w.squaredNorm();
  Mat<2> h;
  h << 2 * x * y, y * y - x * x, y * y - x * x, -2 * x * y;
  return h / r4;
}

Vec<2> grad_log(const Vec<2>& w) { return -w / w.squaredNorm(); }

Mat<2> hess_log(const Vec<2>& w) {
  double r2 = w.squaredNorm();
  return (Mat<2>::Identity() * r2 - 2.0 * w * w.transpose()) / (r2 * r2);
}

FaceJet<2> jet_2d(const Simplex<2>& f, const Vec<2>& y, JetOrder order) {
  const Vec<2> a = f[1] - f[0];
  const double p = a.squaredNorm();
  const double len = std::sqrt(p);
  const Vec<2> s = a / len;
  const Vec<2> n(s.y(), -s.x());
  const Vec<2> w0 = f[0] - y, w1 = f[1] - y;
  const double r = w0.squaredNorm(), p1 = w1.squaredNorm();
  const double q = a.dot(w0);
  const double tiny = 1e-24 * p;
  if (r <= tiny || p1 <= tiny) throw Error(ErrorCode::SingularConfiguration, "query point at a cage vertex");
  // cross(w0, w1) = |a| * h, and its square is the discriminant p r - q^2.
  const double sigma = w0.x() * w1.y() - w0.y() * w1.x();
  const double dot = w0.dot(w1);
  double theta;
  if (sigma * sigma < 1e-12 * p * r) {
    if (dot < 0) throw Error(ErrorCode::SingularConfiguration, "query point on a cage edge");
    theta = 0.0;  // collinear limit of the arctangent terms
  } else {
    theta = std::atan2(sigma, dot);
  }
  const double log_r = std::log(r), log_p1 = std::log(p1);
  const double lam2 = log_p1 - log_r;

  FaceJet<2> jet;
  jet.psi = -len / (4 * kPi) * ((1 + q / p) * log_p1 - (q / p) * log_r - 2 + 2 * sigma * theta / p);
  jet.phi(1) = (sigma * lam2 / (2 * p) - (q / p) * theta) / (2 * kPi);
  jet.phi(0) = (((p + q) / p) * theta - sigma * lam2 / (2 * p)) / (2 * kPi);
  if (order == JetOrder::Value) return jet;

  const double lam = 0.5 * lam2;
  const double h = w0.dot(n);
  const Vec<2> gth = grad_angle(w1) - grad_angle(w0);
  const Vec<2> glam = grad_log(w1) - grad_log(w0);
  const double inv2pi = 1.0 / (2 * kPi);
  jet.grad_psi = inv2pi * (theta * n + lam * s);
  // Hat of vertex k as an affine function: Gamma(y) and its (constant) gradient.
  const double c[2] = {-1.0 / len, 1.0 / len};
  const double gamma[2] = {1.0 + q / p, -q / p};
  for (int k = 0; k < 2; ++k) {
    Vec<2> g = c[k] * s;
    jet.grad_phi[k] = inv2pi * (g * theta + gamma[k] * gth - n * c[k] * lam + h * c[k] * glam);
  }
  if (order == JetOrder::Gradient) return jet;

  const Mat<2> hth = hess_angle(w1) - hess_angle(w0);
  const Mat<2> hlam = hess_log(w1) - hess_log(w0);
  jet.hess_psi = inv2pi * (gth * n.transpose() + glam * s.transpose());
  for (int k = 0; k < 2; ++k) {
    Vec<2> g = c[k] * s;
    Mat<2> hm = g * gth.transpose() + gth * g.transpose() + gamma[k] * hth -
                c[k] * (n * glam.transpose() + glam * n.transpose()) + h * c[k] * hlam;
    jet.hess_phi[k] = inv2pi * hm;
  }
  return jet;
}

// 3D -------------------------------------------------------------------------

struct EdgeTerms {
  Vec<3> s;
  double log_term = 0.0;      // int 1/R along the edge
  Vec<3> e_vec = Vec<3>::Zero();  // int (x - y)/R^3
  Mat<3> e_jac = Mat<3>::Zero();  // its y-gradient, rows indexed by y
};

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

EdgeTerms edge_3d(const Vec<3>& va, const Vec<3>& vb, const Vec<3>& y, JetOrder order) {
  EdgeTerms t;
  const Vec<3> d = vb - va;
  const double len = d.norm();
  t.s = d / len;
  const Vec<3> w0 = va - y, w1 = vb - y;
  const double r0 = w0.norm(), r1 = w1.norm();
  const double e0 = w0.dot(t.s), e1 = w1.dot(t.s);
  const Vec<3> u = w0 - e0 * t.s;
  const double rho2 = u.squaredNorm();
  if (r0 <= 1e-12 * len || r1 <= 1e-12 * len)
    throw Error(ErrorCode::SingularConfiguration, "query point at a cage vertex");
  const bool same_side = e0 * e1 > 0;
  if (!same_side && rho2 <= 1e-24 * len * len)
    throw Error(ErrorCode::SingularConfiguration, "query point on a cage edge");

  t.log_term = (e0 + e1 >= 0) ? std::log((r1 + e1) / (r0 + e0)) : std::log((r0 - e0) / (r1 - e1));
  if (order == JetOrder::Value) return t;

  double i30;
  if (same_side) {
    auto g30 = [&](double e, double r) { return -sgn(e) / (r * (std::abs(e) + r)); };
    i30 = g30(e1, r1) - g30(e0, r0);
  } else {
    i30 = e1 / (rho2 * r1) - e0 / (rho2 * r0);
  }
  t.e_vec = u * i30 + t.s * (1.0 / r0 - 1.0 / r1);
  if (order == JetOrder::Gradient) return t;

  double i50, i52;
  const double i51 = -1.0 / (3 * r1 * r1 * r1) + 1.0 / (3 * r0 * r0 * r0);
  if (same_side) {
    auto g50 = [&](double e, double r) {
      double r3 = r * r * r;
      return -sgn(e) * (3 * e * e + 4 * rho2) / (3 * r3 * (std::abs(e) * (3 * rho2 + 2 * e * e) + 2 * r3));
    };
    auto g52 = [&](double e, double r) {
      double r3 = r * r * r, ae = std::abs(e);
      return -sgn(e) * (3 * e * e * e * e + 3 * e * e * rho2 + rho2 * rho2) / (3 * r3 * (ae * ae * ae + r3));
    };
    i50 = g50(e1, r1) - g50(e0, r0);
    i52 = g52(e1, r1) - g52(e0, r0);
  } else {
    auto f50 = [&](double e, double r) { return e * (3 * rho2 + 2 * e * e) / (3 * rho2 * rho2 * r * r * r); };
    auto f52 = [&](double e, double r) { return e * e * e / (3 * rho2 * r * r * r); };
    i50 = f50(e1, r1) - f50(e0, r0);
    i52 = f52(e1, r1) - f52(e0, r0);
  }
  const Vec<3>& s = t.s;
  t.e_jac = -i30 * Mat<3>::Identity() +
            3.0 * (u * u.transpose() * i50 + (u * s.transpose() + s * u.transpose()) * i51 + s * s.transpose() * i52);
  return t;
}

FaceJet<3> jet_3d(const Simplex<3>& v, const Vec<3>& y, JetOrder order) {
  const Vec<3> nraw = (v[1] - v[0]).cross(v[2] - v[0]);
  const double area2 = nraw.norm();
  const Vec<3> n = nraw / area2;
  const Vec<3> a = v[0] - y, b = v[1] - y, c = v[2] - y;
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double det = a.dot(b.cross(c));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  const double h = a.dot(n);
  if (std::abs(h) <= 1e-12 * std::sqrt(area2) && den < 0)
    throw Error(ErrorCode::SingularConfiguration, "query point on a cage face");
  const double omega = 2.0 * std::atan2(det, den);

  std::array<EdgeTerms, 3> edges;
  std::array<Vec<3>, 3> m;
  double s_int = -h * omega;
  for (int k = 0; k < 3; ++k) {
    edges[k] = edge_3d(v[k], v[(k + 1) % 3], y, order);
    m[k] = edges[k].s.cross(n);
    s_int += (v[k] - y).dot(m[k]) * edges[k].log_term;
  }

  // Hat gradients and affine extensions evaluated at y.
  std::array<Vec<3>, 3> g;
  std::array<double, 3> gamma;
  std::array<std::array<double, 3>, 3> cc;
  std::array<double, 3> sum_cl;
  std::array<double, 3> phi_raw;
  for (int i = 0; i < 3; ++i) {
    g[i] = n.cross(v[(i + 2) % 3] - v[(i + 1) % 3]) / area2;
    gamma[i] = 1.0 + g[i].dot(y - v[i]);
    sum_cl[i] = 0.0;
    for (int k = 0; k < 3; ++k) {
      cc[i][k] = g[i].dot(m[k]);
      sum_cl[i] += cc[i][k] * edges[k].log_term;
    }
    phi_raw[i] = gamma[i] * omega - h * sum_cl[i];
  }

  const double inv4pi = 1.0 / (4 * kPi);
  FaceJet<3> jet;
  jet.psi = s_int * inv4pi;
  for (int i = 0; i < 3; ++i) jet.phi(i) = phi_raw[i] * inv4pi;
  if (order == JetOrder::Value) return jet;

  Vec<3> g_omega = Vec<3>::Zero();
  Vec<3> g_s = omega * n;
  for (int k = 0; k < 3; ++k) {
    g_omega -= edges[k].s.cross(edges[k].e_vec);
    g_s -= m[k] * edges[k].log_term;
  }
  std::array<Vec<3>, 3> se;
  jet.grad_psi = g_s * inv4pi;
  for (int i = 0; i < 3; ++i) {
    se[i].setZero();
    for (int k = 0; k < 3; ++k) se[i] += cc[i][k] * edges[k].e_vec;
    jet.grad_phi[i] = (g[i] * omega + gamma[i] * g_omega + n * sum_cl[i] - h * se[i]) * inv4pi;
  }
  if (order == JetOrder::Gradient) return jet;

  Mat<3> h_omega = Mat<3>::Zero();
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r) h_omega.row(r) -= edges[k].s.cross(Vec<3>(edges[k].e_jac.row(r))).transpose();
  Mat<3> h_s = g_omega * n.transpose();
  for (int k = 0; k < 3; ++k) h_s -= edges[k].e_vec * m[k].transpose();
  jet.hess_psi = 0.5 * (h_s + h_s.transpose()) * inv4pi;
  for (int i = 0; i < 3; ++i) {
    Mat<3> sh = Mat<3>::Zero();
    for (int k = 0; k < 3; ++k) sh += cc[i][k] * edges[k].e_jac;
    Mat<3> hm = g_omega * g[i].transpose() + g[i] * g_omega.transpose() + gamma[i] * h_omega +
                se[i] * n.transpose() + n * se[i].transpose() - h * sh;
    jet.hess_phi[i] = 0.5 * (hm + hm.transpose()) * inv4pi;
  }
  return jet;
}

}  // namespace

template <int D>
double fundamental_solution(const SpdMatrix<D>& a, const Vec<D>& xi, const Vec<D>& eta) {
  double qf = quadratic_form(a, xi, eta);
  double sd = std::sqrt(a.det());
  if constexpr (D == 2)
    return std::log(std::sqrt(qf)) / (2 * kPi * sd);
  else
    return -1.0 / (unit_sphere_area<3>() * sd * std::sqrt(qf));
}

template <int D>
Vec<D> fundamental_gradient(const SpdMatrix<D>& a, const Vec<D>& xi, const Vec<D>& eta) {
  double qf = quadratic_form(a, xi, eta);
  double scale = 1.0 / (unit_sphere_area<D>() * std::sqrt(a.det()) * std::pow(qf, 0.5 * D));
  return scale * (a.inverse() * (xi - eta));
}

template <int D>
FaceJet<D> iso_face_jet(const Simplex<D>& face, const Vec<D>& y, JetOrder order) {
  if constexpr (D == 2)
    return jet_2d(face, y, order);
  else
    return jet_3d(face, y, order);
}

template <int D>
KernelContext<D>::KernelContext(const SpdMatrix<D>& a, const Cage<D>& cage)
    : a_(a), source_(cage), pulled_(transform_cage(cage, a.inv_sqrt())) {
  rescale_.resize(cage.num_faces());
  for (std::size_t j = 0; j < cage.num_faces(); ++j) {
    const Vec<D>& n = cage.normal(j);
    rescale_[j] = 1.0 / std::sqrt(n.dot(a.entries() * n));
  }
}

template <int D>
Simplex<D> KernelContext<D>::pulled_face(std::size_t face) const {
  Simplex<D> s;
  const auto& f = pulled_.face(face);
  for (int k = 0; k < D; ++k) s[k] = pulled_.vertex(f[k]);
  return s;
}

template <int D>
FaceJet<D> KernelContext<D>::face_jet(std::size_t face, const Vec<D>& eta, JetOrder order) const {
  FaceJet<D> jet = iso_face_jet<D>(pulled_face(face), pull(eta), order);
  const double rho = rescale_[face];
  jet.psi *= rho;
  if (order == JetOrder::Value) return jet;
  const Mat<D>& t = a_.inv_sqrt();
  jet.grad_psi = rho * (t * jet.grad_psi);
  for (int k = 0; k < D; ++k) jet.grad_phi[k] = t * jet.grad_phi[k];
  if (order == JetOrder::Gradient) return jet;
  jet.hess_psi = rho * (t * jet.hess_psi * t);
  for (int k = 0; k < D; ++k) jet.hess_phi[k] = t * jet.hess_phi[k] * t;
  return jet;
}

template double fundamental_solution(const SpdMatrix<2>&, const Vec<2>&, const Vec<2>&);
template double fundamental_solution(const SpdMatrix<3>&, const Vec<3>&, const Vec<3>&);
template Vec<2> fundamental_gradient(const SpdMatrix<2>&, const Vec<2>&, const Vec<2>&);
template Vec<3> fundamental_gradient(const SpdMatrix<3>&, const Vec<3>&, const Vec<3>&);
template FaceJet<2> iso_face_jet<2>(const Simplex<2>&, const Vec<2>&, JetOrder);
template FaceJet<3> iso_face_jet<3>(const Simplex<3>&, const Vec<3>&, JetOrder);
template class KernelContext<2>;
template class KernelContext<3>;

}  // namespace anigreen
