#pragma once

#include "anigreen/cage.hpp"
#include "anigreen/error.hpp"
#include "anigreen/spd.hpp"

#include <random>
#include <vector>

namespace anigreen::fixtures {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

// Counter-clockwise polygon with n vertices. Convex ones sit on a circle at
// sorted random angles; the others are star-shaped with random radii.
Cage<2> random_polygon(Rng& rng, int n, bool convex);

Cage<3> cube_cage(double half = 1.0);
// Icosahedron subdivided `levels` times, projected to the unit sphere.
Cage<3> icosphere_cage(int levels);
// Icosphere with radii jittered by up to `amount` (star-shaped, closed).
Cage<3> perturbed_sphere_cage(Rng& rng, int levels, double amount);
// Non-convex closed mesh: an L-shaped prism.
Cage<3> l_prism_cage();

// Random SPD with condition number in [1, max_cond], random overall scale.
Spd2 random_spd2(Rng& rng, double max_cond = 100.0);
Spd3 random_spd3(Rng& rng, double max_cond = 100.0);

// Rotation by random Euler angles.
Mat<3> random_rotation3(Rng& rng);

}  // namespace anigreen::fixtures
