#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace specgap {

// Unit cell [0,1]^n with m disjoint open balls of common radius r strictly
// inside. Coordinates beyond `dim` are ignored and kept at zero.
struct UnitCellGeometry {
  int dim = 2;  // n, 2 or 3
  double radius = 0.0;
  std::vector<std::array<double, 3>> centers;

  std::size_t count() const { return centers.size(); }
};

// Volume of one ball, surface measure of one sphere, and the residual volume
// |F| = 1 - m |B| of the connected bulk region.
double ball_volume(const UnitCellGeometry& g);
double ball_surface(const UnitCellGeometry& g);
double bulk_volume(const UnitCellGeometry& g);

// Checks that every ball is strictly inside the open cell and that the closed
// balls are pairwise disjoint; throws geometry_error otherwise. Returns the
// safety margin kappa = (1/2) min_j dist(B_j, boundary or other balls), the
// radius slack available around each inclusion. Empty geometry (no balls) is
// valid and reports kappa = +inf.
double validate_geometry(const UnitCellGeometry& g);

// Medium coefficient pair (a_j, b_j) per inclusion plus the shell exponent.
struct MediumCoefficients {
  std::vector<double> a, b;
  double gamma = 0.0;  // shell thickness exponent, > 3
};

// Scaled one-cell medium at lattice spacing epsilon: bulk coefficient
// 1/eps^2, shell of thickness delta = eps^(gamma-1) carrying a_j * delta so
// that the areal conductance across shell j is a_j for every epsilon, and
// density b_j on ball plus shell. delta is stored, never recomputed.
struct PeriodicMedium {
  UnitCellGeometry geom;
  MediumCoefficients coeffs;
  double epsilon = 0.0;
  double delta = 0.0;
  double bulk_a = 0.0;
  std::vector<double> shell_a;  // a_j * delta

  // Validates everything (geometry, coefficient positivity, gamma > 3,
  // 0 < epsilon < 1, delta < radius) and fills the derived fields.
  static PeriodicMedium make(UnitCellGeometry geom, MediumCoefficients coeffs,
                             double epsilon);
};

enum class Region { bulk, shell, inclusion };

struct RegionTag {
  Region region = Region::bulk;
  int index = -1;  // inclusion id for shell/inclusion, -1 for bulk
};

// Region of a point of the unit cell. Boundary convention: |y - x_j| = r -
// delta belongs to the inclusion, |y - x_j| = r to the shell.
RegionTag classify_point(std::span<const double> y, const PeriodicMedium& med);

double eval_a(std::span<const double> y, const PeriodicMedium& med);
double eval_b(std::span<const double> y, const PeriodicMedium& med);

}  // namespace specgap
