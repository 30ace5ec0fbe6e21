#pragma once

#include "anigreen/coords.hpp"
#include "anigreen/differentials.hpp"

#include <string>
#include <vector>

namespace anigreen {

inline constexpr const char* kIsoDistortionDefinition = "||J^T J - I||_F / sqrt(d)";
inline constexpr const char* kAreaDistortionDefinition = "|det J - 1|";

template <int D>
struct SampleDistortion {
  Vec<D> point;
  Mat<D> jacobian;
  double iso = 0.0;
  double area = 0.0;
};

template <int D>
struct DistortionReport {
  std::vector<SampleDistortion<D>> samples;
  double mean_iso = 0.0;
  double mean_area = 0.0;
  MatrixSpec<D> config;
  bool baseline = false;  // the A = I row added by sweep
};

double iso_distortion(const Eigen::MatrixXd& jacobian);
double area_distortion(const Eigen::MatrixXd& jacobian);

/// Distortion of the cage deformation at the samples, using the deformation
/// coefficients a = target vertices and b = s_j A n~_j.
template <int D>
DistortionReport<D> measure(const KernelContext<D>& ctx, const CagePair<D>& pair, const PointList<D>& samples,
                            bool use_scale = true, const InteriorPolicy& policy = {});

/// One report per grid entry plus an A = I baseline row when the grid has
/// none, sorted by mean_iso (ties keep grid order).
template <int D>
std::vector<DistortionReport<D>> sweep(const CagePair<D>& pair, const std::vector<MatrixSpec<D>>& grid,
                                       const PointList<D>& samples, bool use_scale = true,
                                       const InteriorPolicy& policy = {});

}  // namespace anigreen
