#pragma once

// Deterministic generators for property-style tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "specgap/design.hpp"
#include "specgap/geometry.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

// Interlaced gap targets with comfortable separations so that linear-algebra
// cross checks stay well conditioned.
inline specgap::GapSpec random_spec(Rng& rng, int m_max) {
  std::uniform_int_distribution<int> m_dist(1, m_max);
  std::uniform_real_distribution<double> step(0.25, 3.0);
  int m = m_dist(rng);
  specgap::GapSpec spec;
  double x = step(rng);  // alpha_1 > 0
  for (int j = 0; j < m; ++j) {
    spec.alpha.push_back(x);
    x += step(rng);
    spec.beta.push_back(x);
    x += step(rng);
  }
  spec.window = x + step(rng);
  return spec;
}

// m disjoint balls placed on a jittered sub-lattice of the unit cell.
inline specgap::UnitCellGeometry random_geometry(Rng& rng, int m, int dim) {
  int g = 1;
  while (g * g * (dim == 3 ? g : 1) < m) ++g;
  ++g;  // spare room
  double cell = 1.0 / g;
  std::vector<int> slots(static_cast<std::size_t>(dim == 3 ? g * g * g : g * g));
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
  std::shuffle(slots.begin(), slots.end(), rng);

  specgap::UnitCellGeometry geom;
  geom.dim = dim;
  geom.radius = 0.25 * cell;
  std::uniform_real_distribution<double> jitter(-0.1 * cell, 0.1 * cell);
  for (int j = 0; j < m; ++j) {
    int s = slots[static_cast<std::size_t>(j)];
    std::array<double, 3> c{0.0, 0.0, 0.0};
    c[0] = (s % g + 0.5) * cell + jitter(rng);
    c[1] = ((s / g) % g + 0.5) * cell + jitter(rng);
    if (dim == 3) c[2] = ((s / (g * g)) % g + 0.5) * cell + jitter(rng);
    geom.centers.push_back(c);
  }
  return geom;
}

}  // namespace testsupport
