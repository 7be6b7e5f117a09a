#include "specgap/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

void require_dim(int dim) {
  if (dim != 2 && dim != 3)
    throw geometry_error("geometry dim must be 2 or 3, got " +
                         std::to_string(dim));
}

double dist(const std::array<double, 3>& p, const std::array<double, 3>& q,
            int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (p[d] - q[d]) * (p[d] - q[d]);
  return std::sqrt(s);
}

}  // namespace

double ball_volume(const UnitCellGeometry& g) {
  require_dim(g.dim);
  if (g.dim == 2) return std::numbers::pi * g.radius * g.radius;
  return 4.0 / 3.0 * std::numbers::pi * g.radius * g.radius * g.radius;
}

double ball_surface(const UnitCellGeometry& g) {
  require_dim(g.dim);
  if (g.dim == 2) return 2.0 * std::numbers::pi * g.radius;
  return 4.0 * std::numbers::pi * g.radius * g.radius;
}

double bulk_volume(const UnitCellGeometry& g) {
  return 1.0 - static_cast<double>(g.count()) * ball_volume(g);
}

double validate_geometry(const UnitCellGeometry& g) {
  require_dim(g.dim);
  if (g.centers.empty()) return std::numeric_limits<double>::infinity();
  if (!(g.radius > 0.0))
    throw geometry_error("inclusion radius must be positive");

  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.centers.size(); ++j) {
    for (int d = 0; d < g.dim; ++d) {
      double c = g.centers[j][d];
      double room = std::min(c - g.radius, 1.0 - c - g.radius);
      if (!(room > 0.0))
        throw geometry_error("ball " + std::to_string(j + 1) +
                             " is not strictly inside the cell");
      margin = std::min(margin, room);
    }
    for (std::size_t i = 0; i < j; ++i) {
      double sep = dist(g.centers[i], g.centers[j], g.dim) - 2.0 * g.radius;
      if (!(sep > 0.0))
        throw geometry_error("balls " + std::to_string(i + 1) + " and " +
                             std::to_string(j + 1) + " are not disjoint");
      margin = std::min(margin, sep);
    }
  }
  return 0.5 * margin;
}

PeriodicMedium PeriodicMedium::make(UnitCellGeometry geom,
                                    MediumCoefficients coeffs,
                                    double epsilon) {
  validate_geometry(geom);
  std::size_t m = geom.count();
  if (coeffs.a.size() != m || coeffs.b.size() != m)
    throw spec_error("coefficient arrays must have one entry per inclusion");
  for (std::size_t j = 0; j < m; ++j) {
    if (!(coeffs.a[j] > 0.0) || !(coeffs.b[j] > 0.0))
      throw spec_error("coefficients a, b must be positive (entry " +
                       std::to_string(j + 1) + ")");
  }
  if (m > 0 && !(coeffs.gamma > 3.0))
    throw spec_error("shell exponent gamma must exceed 3");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw spec_error("epsilon must lie in (0, 1)");

  PeriodicMedium med;
  med.geom = std::move(geom);
  med.coeffs = std::move(coeffs);
  med.epsilon = epsilon;
  med.bulk_a = 1.0 / (epsilon * epsilon);
  med.delta = m > 0 ? std::pow(epsilon, med.coeffs.gamma - 1.0) : 0.0;
  if (m > 0 && !(med.delta < med.geom.radius))
    throw spec_error(
        "shell thickness eps^(gamma-1) reaches the inclusion radius; "
        "decrease epsilon or increase gamma");
  med.shell_a.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    med.shell_a[j] = med.coeffs.a[j] * med.delta;
  return med;
}

RegionTag classify_point(std::span<const double> y,
                         const PeriodicMedium& med) {
  const auto& g = med.geom;
  for (std::size_t j = 0; j < g.centers.size(); ++j) {
    double s = 0.0;
    for (int d = 0; d < g.dim; ++d)
      s += (y[d] - g.centers[j][d]) * (y[d] - g.centers[j][d]);
    double dj = std::sqrt(s);
    if (dj <= g.radius - med.delta)
      return {Region::inclusion, static_cast<int>(j)};
    if (dj <= g.radius) return {Region::shell, static_cast<int>(j)};
  }
  return {Region::bulk, -1};
}

double eval_a(std::span<const double> y, const PeriodicMedium& med) {
  auto tag = classify_point(y, med);
  if (tag.region == Region::shell)
    return med.shell_a[static_cast<std::size_t>(tag.index)];
  return med.bulk_a;  // bulk and inclusion share the background value
}

double eval_b(std::span<const double> y, const PeriodicMedium& med) {
  auto tag = classify_point(y, med);
  if (tag.region == Region::bulk) return 1.0;
  return med.coeffs.b[static_cast<std::size_t>(tag.index)];
}

}  // namespace specgap
