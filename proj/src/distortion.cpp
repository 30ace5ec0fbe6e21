#include "anigreen/distortion.hpp"

#include "anigreen/error.hpp"
#include "anigreen/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace anigreen {

double iso_distortion(const Eigen::MatrixXd& j) {
  const auto d = j.rows();
  return (j.transpose() * j - Eigen::MatrixXd::Identity(d, d)).norm() / std::sqrt(double(d));
}

double area_distortion(const Eigen::MatrixXd& j) { return std::abs(j.determinant() - 1.0); }

template <int D>
DistortionReport<D> measure(const KernelContext<D>& ctx, const CagePair<D>& pair, const PointList<D>& samples,
                            bool use_scale, const InteriorPolicy& policy) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "distortion needs at least one sample");
  if (pair.source.id() != ctx.source().id())
    throw Error(ErrorCode::ConnectivityMismatch, "cage pair does not match the kernel context's cage");
  auto diff = compute_differentials(ctx, samples, false, policy);
  RowMatrix a(pair.target.num_vertices(), D);
  for (std::size_t i = 0; i < pair.target.num_vertices(); ++i) a.row(i) = pair.target.vertex(i).transpose();
  RowMatrix coeffs = stack_coefficients(a, neumann_coefficients(pair, ctx.matrix(), use_scale));

  DistortionReport<D> rep;
  rep.samples.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    auto& s = rep.samples[i];
    s.point = diff.samples[i];
    s.jacobian = map_jacobian(diff, i, coeffs);
    s.iso = iso_distortion(s.jacobian);
    s.area = area_distortion(s.jacobian);
  });
  for (const auto& s : rep.samples) {
    rep.mean_iso += s.iso;
    rep.mean_area += s.area;
  }
  rep.mean_iso /= double(samples.size());
  rep.mean_area /= double(samples.size());
  return rep;
}

template <int D>
std::vector<DistortionReport<D>> sweep(const CagePair<D>& pair, const std::vector<MatrixSpec<D>>& grid,
                                       const PointList<D>& samples, bool use_scale, const InteriorPolicy& policy) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grid is empty");
  std::vector<MatrixSpec<D>> specs = grid;
  bool has_identity = std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.is_identity(); });
  if (!has_identity) specs.push_back(MatrixSpec<D>::identity());
  std::vector<DistortionReport<D>> out;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    KernelContext<D> ctx(build_matrix(specs[g]), pair.source);
    auto rep = measure(ctx, pair, samples, use_scale, policy);
    rep.config = specs[g];
    rep.baseline = specs[g].is_identity();
    out.push_back(std::move(rep));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.mean_iso < r.mean_iso; });
  return out;
}

template DistortionReport<2> measure(const KernelContext<2>&, const CagePair<2>&, const PointList<2>&, bool,
                                     const InteriorPolicy&);
template DistortionReport<3> measure(const KernelContext<3>&, const CagePair<3>&, const PointList<3>&, bool,
                                     const InteriorPolicy&);
template std::vector<DistortionReport<2>> sweep(const CagePair<2>&, const std::vector<MatrixSpec<2>>&,
                                                const PointList<2>&, bool, const InteriorPolicy&);
template std::vector<DistortionReport<3>> sweep(const CagePair<3>&, const std::vector<MatrixSpec<3>>&,
                                                const PointList<3>&, bool, const InteriorPolicy&);

}  // namespace anigreen
