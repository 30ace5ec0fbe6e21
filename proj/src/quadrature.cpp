#include "anigreen/quadrature.hpp"

#include "anigreen/error.hpp"
#include "anigreen/parallel.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace anigreen {

namespace {

GaussRule make_rule(int order) {
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// A piece of the parameter domain, kept in barycentric coordinates of the
// whole simplex so hats can be evaluated exactly.
template <int D>
struct Piece {
  std::array<Vec<D>, D> corners;
  double fraction;  // share of the total measure
};

template <int D>
class Integrator {
 public:
  Integrator(const Simplex<D>& s, int ncomp, const SimplexIntegrand<D>& f, const QuadratureOptions& opts)
      : simplex_(s), ncomp_(ncomp), f_(f), opts_(opts), rule_(gauss_legendre(opts.order)), buf_(ncomp) {
    if constexpr (D == 2)
      measure_ = (s[1] - s[0]).norm();
    else
      measure_ = 0.5 * (s[1] - s[0]).cross(s[2] - s[0]).norm();
  }

  Eigen::VectorXd run() {
    Piece<D> root;
    for (int k = 0; k < D; ++k) root.corners[k] = Vec<D>::Unit(k);
    root.fraction = 1.0;
    // L1 scale from one refinement level.
    scale_ = Eigen::VectorXd::Zero(ncomp_);
    for (const auto& c : split(root)) scale_ += rule_on(c, true);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(ncomp_);
    refine(root, rule_on(root, false), 0, acc);
    return acc;
  }

 private:
  std::vector<Piece<D>> split(const Piece<D>& p) const {
    if constexpr (D == 2) {
      Vec<2> mid = 0.5 * (p.corners[0] + p.corners[1]);
      return {Piece<D>{{p.corners[0], mid}, 0.5 * p.fraction}, Piece<D>{{mid, p.corners[1]}, 0.5 * p.fraction}};
    } else {
      const auto& c = p.corners;
      Vec<3> m01 = 0.5 * (c[0] + c[1]), m12 = 0.5 * (c[1] + c[2]), m20 = 0.5 * (c[2] + c[0]);
      double fr = 0.25 * p.fraction;
      return {Piece<D>{{c[0], m01, m20}, fr}, Piece<D>{{m01, c[1], m12}, fr}, Piece<D>{{m20, m12, c[2]}, fr},
              Piece<D>{{m12, m20, m01}, fr}};
    }
  }

  Vec<D> point_of(const Vec<D>& bary) const {
    Vec<D> x = Vec<D>::Zero();
    for (int k = 0; k < D; ++k) x += bary(k) * simplex_[k];
    return x;
  }

  Eigen::VectorXd rule_on(const Piece<D>& p, bool absolute) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(ncomp_);
    const int n = int(rule_.nodes.size());
    if constexpr (D == 2) {
      double jac = measure_ * p.fraction;
      for (int i = 0; i < n; ++i) {
        double t = rule_.nodes[i];
        Vec<2> b = (1 - t) * p.corners[0] + t * p.corners[1];
        buf_.setZero();
        f_(point_of(b), b, buf_);
        sum += rule_.weights[i] * (absolute ? Eigen::VectorXd(buf_.cwiseAbs()) : buf_);
      }
      return sum * jac;
    } else {
      // Collapsed square: (u, v) -> c0 + u (c1 - c0) + v (1 - u) (c2 - c0).
      double jac = 2.0 * measure_ * p.fraction;
      const auto& c = p.corners;
      for (int i = 0; i < n; ++i) {
        double u = rule_.nodes[i];
        for (int j = 0; j < n; ++j) {
          double v = rule_.nodes[j];
          Vec<3> b = c[0] + u * (c[1] - c[0]) + v * (1 - u) * (c[2] - c[0]);
          buf_.setZero();
          f_(point_of(b), b, buf_);
          double w = rule_.weights[i] * rule_.weights[j] * (1 - u);
          sum += w * (absolute ? Eigen::VectorXd(buf_.cwiseAbs()) : buf_);
        }
      }
      return sum * jac;
    }
  }

  void refine(const Piece<D>& p, const Eigen::VectorXd& coarse, int depth, Eigen::VectorXd& acc) {
    auto kids = split(p);
    std::vector<Eigen::VectorXd> vals;
    Eigen::VectorXd fine = Eigen::VectorXd::Zero(ncomp_);
    for (const auto& k : kids) {
      vals.push_back(rule_on(k, false));
      fine += vals.back();
    }
    bool ok = true;
    for (int c = 0; c < ncomp_ && ok; ++c) {
      double tol = opts_.rel_tol * std::max(scale_(c), 1e-300) * p.fraction;
      ok = std::abs(fine(c) - coarse(c)) <= tol;
    }
    if (ok) {
      acc += fine;
      return;
    }
    if (depth + 1 >= opts_.max_depth)
      throw Error(ErrorCode::NoConvergence, "quadrature did not converge within depth " + std::to_string(opts_.max_depth));
    for (std::size_t k = 0; k < kids.size(); ++k) refine(kids[k], vals[k], depth + 1, acc);
  }

  Simplex<D> simplex_;
  int ncomp_;
  const SimplexIntegrand<D>& f_;
  QuadratureOptions opts_;
  const GaussRule& rule_;
  Eigen::VectorXd buf_;
  Eigen::VectorXd scale_;
  double measure_ = 0.0;
};

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

template <int D>
Eigen::VectorXd integrate_simplex(const Simplex<D>& simplex, int ncomp, const SimplexIntegrand<D>& f,
                                  const QuadratureOptions& opts) {
  Integrator<D> integ(simplex, ncomp, f, opts);
  return integ.run();
}

template <int D>
OracleValues<D> quadrature_face(const SpdMatrix<D>& a, const Cage<D>& cage, std::size_t face, const Vec<D>& eta,
                                double rel_tol) {
  if (rel_tol < 1e-12) throw Error(ErrorCode::InvalidArgument, "quadrature rel_tol must be >= 1e-12");
  Simplex<D> s;
  for (int k = 0; k < D; ++k) s[k] = cage.vertex(cage.face(face)[k]);
  const Vec<D> n = cage.normal(face);
  const Vec<D> an = a.entries() * n;
  SimplexIntegrand<D> f = [&](const Vec<D>& x, const Vec<D>& bary, Eigen::Ref<Eigen::VectorXd> out) {
    out(0) = -fundamental_solution(a, x, eta);
    double flux = an.dot(fundamental_gradient(a, x, eta));
    for (int k = 0; k < D; ++k) out(1 + k) = bary(k) * flux;
  };
  QuadratureOptions opts;
  opts.rel_tol = rel_tol;
  Eigen::VectorXd r = integrate_simplex<D>(s, D + 1, f, opts);
  OracleValues<D> v;
  v.psi = r(0);
  v.phi = r.tail(D);
  return v;
}

template <int D>
double quadrature_integral(QuadKind kind, const Cage<D>& cage, std::size_t face, int vertex,
                           const SpdMatrix<D>& a, const Vec<D>& eta, double rel_tol) {
  auto v = quadrature_face(a, cage, face, eta, rel_tol);
  if (kind == QuadKind::Psi) return v.psi;
  if (vertex < 0 || vertex >= D) throw Error(ErrorCode::InvalidArgument, "local vertex index out of range");
  return v.phi(vertex);
}

template <int D>
OracleReport compare_with_oracle(const KernelContext<D>& ctx, const PointList<D>& points, double rel_tol) {
  const Cage<D>& cage = ctx.source();
  const std::size_t nf = cage.num_faces();
  struct PointResult {
    double psi = 0.0, phi = 0.0;
    std::size_t face = 0;
  };
  std::vector<PointResult> results(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    std::vector<OracleValues<D>> quad(nf), closed(nf);
    double psi_scale = 0.0, phi_scale = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      quad[f] = quadrature_face(ctx.matrix(), cage, f, points[i], rel_tol);
      FaceJet<D> jet = ctx.face_jet(f, points[i]);
      closed[f].psi = jet.psi;
      closed[f].phi = jet.phi;
      psi_scale = std::max(psi_scale, std::abs(quad[f].psi));
      phi_scale = std::max(phi_scale, quad[f].phi.cwiseAbs().maxCoeff());
    }
    PointResult r;
    double worst = -1.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double e = std::abs(closed[f].psi - quad[f].psi) / std::max(std::abs(quad[f].psi), 1e-8 * psi_scale);
      r.psi = std::max(r.psi, e);
      double ephi = 0.0;
      for (int k = 0; k < D; ++k)
        ephi = std::max(ephi, std::abs(closed[f].phi(k) - quad[f].phi(k)) /
                                  std::max(std::abs(quad[f].phi(k)), 1e-8 * phi_scale));
      r.phi = std::max(r.phi, ephi);
      if (std::max(e, ephi) > worst) worst = std::max(e, ephi), r.face = f;
    }
    results[i] = r;
  });
  OracleReport rep;
  rep.values = points.size() * nf * (D + 1);
  for (std::size_t i = 0; i < results.size(); ++i) {
    rep.max_psi_error = std::max(rep.max_psi_error, results[i].psi);
    rep.max_phi_error = std::max(rep.max_phi_error, results[i].phi);
    const double e = std::max(results[i].psi, results[i].phi);
    if (e > rep.max_rel_error || i == 0) {
      rep.max_rel_error = e;
      rep.worst_point = i;
      rep.worst_face = results[i].face;
    }
  }
  return rep;
}

template OracleReport compare_with_oracle(const KernelContext<2>&, const PointList<2>&, double);
template OracleReport compare_with_oracle(const KernelContext<3>&, const PointList<3>&, double);
template Eigen::VectorXd integrate_simplex<2>(const Simplex<2>&, int, const SimplexIntegrand<2>&, const QuadratureOptions&);
template Eigen::VectorXd integrate_simplex<3>(const Simplex<3>&, int, const SimplexIntegrand<3>&, const QuadratureOptions&);
template OracleValues<2> quadrature_face(const SpdMatrix<2>&, const Cage<2>&, std::size_t, const Vec<2>&, double);
template OracleValues<3> quadrature_face(const SpdMatrix<3>&, const Cage<3>&, std::size_t, const Vec<3>&, double);
template double quadrature_integral(QuadKind, const Cage<2>&, std::size_t, int, const SpdMatrix<2>&, const Vec<2>&, double);
template double quadrature_integral(QuadKind, const Cage<3>&, std::size_t, int, const SpdMatrix<3>&, const Vec<3>&, double);

}  // namespace anigreen
