#include "specgap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

double center_distance(const std::array<double, 3>& y,
                       const std::array<double, 3>& c, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double t = y[d] - c[d];
    s += t * t;
  }
  return std::sqrt(s);
}

enum class Fiber { bloch, dirichlet, neumann };

CellOperator assemble_impl(const PeriodicMedium& med, const Grid& grid,
                           std::span<const double> phase, Fiber kind,
                           std::optional<ShellMode> forced) {
  auto field = sample_coefficients(med, grid, forced);

  CellOperator op;
  op.mode = field.res.mode;
  if (kind == Fiber::bloch)
    for (int d = 0; d < grid.dim; ++d) op.phase[d] = phase[d];

  const std::size_t count = grid.size();
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(count * (2 * static_cast<std::size_t>(grid.dim) + 1));

  for (std::size_t idx = 0; idx < count; ++idx) {
    auto m = grid.unpack(idx);
    const int p = static_cast<int>(idx);
    const double ap = field.a[p];
    for (int d = 0; d < grid.dim; ++d) {
      const bool wrap = m[d] + 1 == grid.n;
      if (wrap && kind != Fiber::bloch) {
        // Boundary half-faces: Dirichlet grounds the trace value on both
        // cell faces of the axis, Neumann drops the flux entirely.
        if (kind == Fiber::dirichlet) {
          auto m0 = m;
          m0[d] = 0;
          const int q = static_cast<int>(grid.pack(m0));
          const double t0 = 2.0 * field.a[q] * inv_h2;
          trips.emplace_back(q, q, Complex(t0, 0.0));
          trips.emplace_back(p, p, Complex(2.0 * ap * inv_h2, 0.0));
        }
        continue;
      }
      auto mq = m;
      mq[d] = wrap ? 0 : m[d] + 1;
      const int q = static_cast<int>(grid.pack(mq));
      const double aq = field.a[q];
      const double t = 2.0 * ap * aq / (ap + aq) * inv_h2;
      const Complex f =
          wrap ? std::polar(1.0, phase[d]) : Complex(1.0, 0.0);
      trips.emplace_back(p, p, Complex(t, 0.0));
      trips.emplace_back(q, q, Complex(t, 0.0));
      trips.emplace_back(p, q, -t * f);
      trips.emplace_back(q, p, -t * std::conj(f));
    }
  }

  const auto dim = static_cast<Eigen::Index>(count);
  op.stiffness.resize(dim, dim);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.mass = std::move(field.b);
  return op;
}

// Integral of rho^w over [lo, hi] for w = dim - 1 in {0, 1, 2}.
double moment(double lo, double hi, int w) {
  switch (w) {
    case 0: return hi - lo;
    case 1: return (hi * hi - lo * lo) / 2.0;
    default: return (hi * hi * hi - lo * lo * lo) / 3.0;
  }
}

// Integral of rho^-w over [lo, hi], 0 < lo <= hi.
double inverse_moment(double lo, double hi, int w) {
  switch (w) {
    case 0: return hi - lo;
    case 1: return std::log(hi / lo);
    default: return 1.0 / lo - 1.0 / hi;
  }
}

}  // namespace

ResolutionReport validate_resolution(const PeriodicMedium& med,
                                     const Grid& grid,
                                     std::optional<ShellMode> forced) {
  if (grid.dim != med.geom.dim)
    throw spec_error("grid dim " + std::to_string(grid.dim) +
                     " does not match the medium dim " +
                     std::to_string(med.geom.dim));
  ResolutionReport rep;
  rep.delta = med.delta;
  rep.cells_across = med.delta / grid.h;
  if (med.geom.centers.empty()) {
    rep.mode = forced.value_or(ShellMode::direct);
    rep.shell_width = 0.0;
    return rep;
  }
  if (med.geom.radius < 2.0 * grid.h)
    throw geometry_error("inclusion radius " +
                         std::to_string(med.geom.radius) +
                         " spans fewer than two cells at h = " +
                         std::to_string(grid.h));
  rep.mode = forced.value_or(med.delta >= 3.0 * grid.h ? ShellMode::direct
                                                       : ShellMode::snap);
  rep.shell_width = rep.mode == ShellMode::direct ? med.delta : grid.h;
  return rep;
}

CoefficientField sample_coefficients(const PeriodicMedium& med,
                                     const Grid& grid,
                                     std::optional<ShellMode> forced) {
  CoefficientField field;
  field.res = validate_resolution(med, grid, forced);
  const auto count = static_cast<Eigen::Index>(grid.size());
  field.a.resize(count);
  field.b.resize(count);

  const double r = med.geom.radius;
  for (Eigen::Index i = 0; i < count; ++i) {
    auto y = grid.node(static_cast<std::size_t>(i));
    std::span<const double> yy(y.data(), static_cast<std::size_t>(grid.dim));
    field.b[i] = eval_b(yy, med);
    if (field.res.mode == ShellMode::direct) {
      field.a[i] = eval_a(yy, med);
      continue;
    }
    // Snap: the shell collapses onto the single layer of cells whose centers
    // fall in (r - h, r]. Carrying a_j h there keeps the conductance across
    // the layer at a_j per unit area, the quantity the resonances feel.
    double a = med.bulk_a;
    for (std::size_t j = 0; j < med.geom.centers.size(); ++j) {
      double d = center_distance(y, med.geom.centers[j], grid.dim);
      if (d <= r && d > r - grid.h) {
        a = med.coeffs.a[j] * grid.h;
        break;
      }
    }
    field.a[i] = a;
  }
  return field;
}

CellOperator assemble_bloch(const PeriodicMedium& med, const Grid& grid,
                            std::span<const double> phase,
                            std::optional<ShellMode> forced) {
  if (static_cast<int>(phase.size()) != grid.dim)
    throw spec_error("phase must have one angle per grid axis");
  return assemble_impl(med, grid, phase, Fiber::bloch, forced);
}

CellOperator assemble_dirichlet(const PeriodicMedium& med, const Grid& grid,
                                std::optional<ShellMode> forced) {
  return assemble_impl(med, grid, {}, Fiber::dirichlet, forced);
}

CellOperator assemble_neumann(const PeriodicMedium& med, const Grid& grid,
                              std::optional<ShellMode> forced) {
  return assemble_impl(med, grid, {}, Fiber::neumann, forced);
}

std::vector<double> constant_dispersion(const Grid& grid,
                                        std::span<const double> phase,
                                        double a_value, double b_value) {
  if (static_cast<int>(phase.size()) != grid.dim)
    throw spec_error("phase must have one angle per grid axis");
  if (!(a_value > 0.0) || !(b_value > 0.0))
    throw spec_error("constant dispersion needs positive coefficients");
  const double scale = 4.0 * a_value / (b_value * grid.h * grid.h);
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    auto m = grid.unpack(idx);
    double s = 0.0;
    for (int d = 0; d < grid.dim; ++d) {
      double k = (2.0 * std::numbers::pi * m[d] + phase[d]) * grid.h / 2.0;
      double sn = std::sin(k);
      s += sn * sn;
    }
    out.push_back(scale * s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RadialProfile radial_profile(const PeriodicMedium& med, int inclusion) {
  if (inclusion < 0 ||
      inclusion >= static_cast<int>(med.geom.count()))
    throw spec_error("inclusion index out of range");
  const double kappa = validate_geometry(med.geom);
  const auto j = static_cast<std::size_t>(inclusion);
  RadialProfile prof;
  prof.dim = med.geom.dim;
  prof.outer = med.geom.radius + kappa;
  prof.breaks = {med.geom.radius - med.delta, med.geom.radius};
  prof.a_vals = {med.bulk_a, med.shell_a[j], med.bulk_a};
  prof.b_vals = {med.coeffs.b[j], med.coeffs.b[j], 1.0};
  return prof;
}

RadialProfile unit_radial_profile(int dim, double outer) {
  if (dim < 1 || dim > 3) throw spec_error("radial dim must be 1, 2 or 3");
  if (!(outer > 0.0)) throw spec_error("radial outer radius must be positive");
  RadialProfile prof;
  prof.dim = dim;
  prof.outer = outer;
  prof.a_vals = {1.0};
  prof.b_vals = {1.0};
  return prof;
}

RadialOperator assemble_radial(const RadialProfile& prof, int cells) {
  if (cells < 2) throw spec_error("radial grid needs at least 2 cells");
  if (prof.dim < 1 || prof.dim > 3)
    throw spec_error("radial dim must be 1, 2 or 3");
  if (!(prof.outer > 0.0)) throw spec_error("radial outer radius must be positive");
  const std::size_t segs = prof.breaks.size() + 1;
  if (prof.a_vals.size() != segs || prof.b_vals.size() != segs)
    throw spec_error("radial profile needs one value per segment");
  for (std::size_t s = 0; s < prof.breaks.size(); ++s) {
    double lo = s == 0 ? 0.0 : prof.breaks[s - 1];
    if (!(prof.breaks[s] > lo) || !(prof.breaks[s] < prof.outer))
      throw spec_error("radial breakpoints must ascend inside (0, outer)");
  }
  for (std::size_t s = 0; s < segs; ++s)
    if (!(prof.a_vals[s] > 0.0) || !(prof.b_vals[s] > 0.0))
      throw spec_error("radial coefficients must be positive");

  const int w = prof.dim - 1;
  auto segment = [&](std::size_t s, double& lo, double& hi) {
    lo = s == 0 ? 0.0 : prof.breaks[s - 1];
    hi = s == prof.breaks.size() ? prof.outer : prof.breaks[s];
  };
  auto resistance = [&](double lo, double hi) {
    double sum = 0.0;
    for (std::size_t s = 0; s < segs; ++s) {
      double slo, shi;
      segment(s, slo, shi);
      double cl = std::max(lo, slo), ch = std::min(hi, shi);
      if (ch > cl) sum += inverse_moment(cl, ch, w) / prof.a_vals[s];
    }
    return sum;
  };
  auto mass_in = [&](double lo, double hi) {
    double sum = 0.0;
    for (std::size_t s = 0; s < segs; ++s) {
      double slo, shi;
      segment(s, slo, shi);
      double cl = std::max(lo, slo), ch = std::min(hi, shi);
      if (ch > cl) sum += moment(cl, ch, w) * prof.b_vals[s];
    }
    return sum;
  };

  RadialOperator op;
  op.h = prof.outer / cells;
  op.mass.resize(cells);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    op.mass[i] = mass_in(i * op.h, (i + 1) * op.h);
    double node = (i + 0.5) * op.h;
    if (i + 1 < cells) {
      double t = 1.0 / resistance(node, node + op.h);
      trips.emplace_back(i, i, t);
      trips.emplace_back(i + 1, i + 1, t);
      trips.emplace_back(i, i + 1, -t);
      trips.emplace_back(i + 1, i, -t);
    } else {
      // Dirichlet trace at the outer radius, half a cell away.
      trips.emplace_back(i, i, 1.0 / resistance(node, prof.outer));
    }
  }
  op.stiffness.resize(cells, cells);
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  return op;
}

}  // namespace specgap
