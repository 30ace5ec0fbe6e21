#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace anigreen::fixtures {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Cage<2> random_polygon(Rng& rng, int n, bool convex) {
  std::vector<double> angles(n);
  // keep the angular gaps bounded so nothing degenerates
  for (int i = 0; i < n; ++i) angles[i] = 2 * kPi * (i + uniform(rng, -0.3, 0.3)) / n;
  std::sort(angles.begin(), angles.end());
  PointList<2> v;
  const Vec<2> center(uniform(rng, -2, 2), uniform(rng, -2, 2));
  const double scale = uniform(rng, 0.5, 3.0);
  for (int i = 0; i < n; ++i) {
    const double r = convex ? 1.0 : uniform(rng, 0.45, 1.0);
    v.push_back(center + scale * r * Vec<2>(std::cos(angles[i]), std::sin(angles[i])));
  }
  return Cage<2>::validate(v);
}

Cage<3> cube_cage(double h) {
  PointList<3> v = {{-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
                    {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
  std::vector<Face<3>> f = {{0, 3, 2}, {0, 2, 1}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                         {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return Cage<3>::validate(v, f);
}

namespace {

void icosphere(int levels, PointList<3>& v, std::vector<Face<3>>& f) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
       {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
       {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
       {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      return mid[key] = int(v.size()) - 1;
    };
    std::vector<Face<3>> next;
    for (const auto& tri : f) {
      int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
}

}  // namespace

Cage<3> icosphere_cage(int levels) {
  PointList<3> v;
  std::vector<Face<3>> f;
  icosphere(levels, v, f);
  return Cage<3>::validate(v, f);
}

Cage<3> perturbed_sphere_cage(Rng& rng, int levels, double amount) {
  PointList<3> v;
  std::vector<Face<3>> f;
  icosphere(levels, v, f);
  const Vec<3> center(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  const double scale = uniform(rng, 0.5, 2.0);
  for (auto& p : v) p = center + scale * (1.0 + uniform(rng, -amount, amount)) * p;
  return Cage<3>::validate(v, f);
}

Cage<3> l_prism_cage() {
  // L-shaped cross-section in xy, extruded along z.
  const std::vector<Vec<2>> l = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  PointList<3> v;
  for (double z : {0.0, 1.0})
    for (const auto& p : l) v.push_back(Vec<3>(p.x(), p.y(), z));
  std::vector<Face<3>> f;
  // bottom (normal -z) and top (normal +z), fanned from the reflex-free corner 0 split at vertex 3
  f.push_back({0, 3, 1});
  f.push_back({1, 3, 2});
  f.push_back({0, 5, 3});
  f.push_back({3, 5, 4});
  f.push_back({6, 7, 9});
  f.push_back({7, 8, 9});
  f.push_back({6, 9, 11});
  f.push_back({9, 10, 11});
  for (int i = 0; i < 6; ++i) {
    const int j = (i + 1) % 6;
    f.push_back({i, j, j + 6});
    f.push_back({i, j + 6, i + 6});
  }
  return Cage<3>::validate(v, f);
}

Spd2 random_spd2(Rng& rng, double max_cond) {
  const double s = std::exp(uniform(rng, -1, 1));
  const double cond = std::exp(uniform(rng, 0, std::log(max_cond)));
  const double theta = uniform(rng, -kPi, kPi);
  return build_2d({theta, s, s * cond});
}

Mat<3> random_rotation3(Rng& rng) {
  return rotation_zyx(uniform(rng, -kPi, kPi), uniform(rng, -kPi / 2, kPi / 2), uniform(rng, -kPi, kPi));
}

Spd3 random_spd3(Rng& rng, double max_cond) {
  const double s = std::exp(uniform(rng, -1, 1));
  const double cond = std::exp(uniform(rng, 0, std::log(max_cond)));
  const double mid = std::exp(uniform(rng, 0, std::log(cond)));
  return Spd3::from_spectrum(random_rotation3(rng), Vec<3>(s, s * mid, s * cond));
}

}  // namespace anigreen::fixtures
