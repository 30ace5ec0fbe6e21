#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <array>
#include <cstdint>
#include <vector>

namespace anigreen {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
using Mat = Eigen::Matrix<double, D, D>;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <int D>
using PointList = std::vector<Vec<D>>;

// A cage face: an oriented edge (2D) or an oriented triangle (3D).
template <int D>
using Face = std::array<int, D>;

// Number of entries kept when a symmetric DxD matrix is flattened.
template <int D>
inline constexpr int kSymSize = D * (D + 1) / 2;

template <int D>
using SymVec = Eigen::Matrix<double, kSymSize<D>, 1>;

inline constexpr double kPi = 3.14159265358979323846;

// Surface area of the unit sphere in R^D.
template <int D>
constexpr double unit_sphere_area() {
  static_assert(D == 2 || D == 3);
  return D == 2 ? 2.0 * kPi : 4.0 * kPi;
}

// FNV-1a over raw bytes; used for provenance handles on tables.
std::uint64_t fingerprint(const void* data, std::size_t bytes, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace anigreen
