#include "specgap/homogenize.hpp"

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

struct Face {
  int lo, hi;  // packed unknowns
  int axis;
};

bool inside_any_ball(const UnitCellGeometry& geom,
                     const std::array<double, 3>& x) {
  double r2 = geom.radius * geom.radius;
  for (const auto& c : geom.centers) {
    double d2 = 0.0;
    for (int d = 0; d < geom.dim; ++d) d2 += (x[d] - c[d]) * (x[d] - c[d]);
    if (d2 <= r2) return true;
  }
  return false;
}

// Periodic faces of the bulk subgraph; faces touching an excluded node are
// dropped, which is the natural (Neumann) boundary of the staircase domain.
std::vector<Face> bulk_faces(const Grid& grid, const std::vector<char>& mask,
                             const std::vector<int>& unknown_of_node) {
  std::vector<Face> faces;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!mask[idx]) continue;
    auto m = grid.unpack(idx);
    for (int d = 0; d < grid.dim; ++d) {
      auto mq = m;
      mq[d] = (m[d] + 1) % grid.n;
      std::size_t q = grid.pack(mq);
      if (!mask[q]) continue;
      faces.push_back({unknown_of_node[idx], unknown_of_node[q], d});
    }
  }
  return faces;
}

// Plain CG with the constant mode projected out; the graph Laplacian is
// singular exactly along constants and the data is compatible.
double solve_projected(const Eigen::SparseMatrix<double>& A,
                       const Eigen::VectorXd& rhs, double tolerance,
                       Eigen::VectorXd& x) {
  const Eigen::Index n = A.rows();
  x = Eigen::VectorXd::Zero(n);
  double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return 0.0;

  auto project = [n](Eigen::VectorXd& y) { y.array() -= y.sum() / n; };

  Eigen::VectorXd r = rhs;
  project(r);
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const int max_iterations = 400 + 40 * static_cast<int>(std::sqrt(double(n)));
  double rel = std::sqrt(rs) / rhs_norm;
  for (int it = 0; it < max_iterations; ++it) {
    if (rel <= tolerance) break;
    Eigen::VectorXd Ap = A * p;
    double denom = p.dot(Ap);
    if (denom <= 0.0) break;
    double alpha = rs / denom;
    x += alpha * p;
    r -= alpha * Ap;
    project(r);
    double rs_next = r.squaredNorm();
    rel = std::sqrt(rs_next) / rhs_norm;
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  if (rel > tolerance)
    throw solver_error("cell problem failed to reach " +
                           std::to_string(tolerance),
                       {rel});
  project(x);
  return rel;
}

}  // namespace

CellSolution solve_cell_problem(const UnitCellGeometry& geom, const Grid& grid,
                                double tolerance) {
  if (grid.dim != geom.dim)
    throw spec_error("grid dimension does not match the geometry");
  if (!(tolerance > 0.0)) throw spec_error("tolerance must be positive");
  if (geom.count() > 0) validate_geometry(geom);

  CellSolution sol{grid, {}, {}, {}, {}, 0.0};
  sol.in_bulk.assign(grid.size(), 1);
  std::vector<int> unknown_of_node(grid.size(), -1);
  if (geom.count() > 0) {
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      sol.in_bulk[idx] = inside_any_ball(geom, grid.node(idx)) ? 0 : 1;
  }
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!sol.in_bulk[idx]) continue;
    unknown_of_node[idx] = static_cast<int>(sol.node_of_unknown.size());
    sol.node_of_unknown.push_back(static_cast<int>(idx));
  }
  const int n = static_cast<int>(sol.node_of_unknown.size());
  if (n == 0)
    throw geometry_error("no grid node lies outside the perforation");

  auto faces = bulk_faces(grid, sol.in_bulk, unknown_of_node);
  std::array<int, 3> per_axis{0, 0, 0};
  for (const auto& f : faces) ++per_axis[f.axis];
  for (int d = 0; d < grid.dim; ++d)
    if (per_axis[d] == 0)
      throw geometry_error("perforation leaves no bulk face along axis " +
                           std::to_string(d));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * faces.size());
  for (const auto& f : faces) {
    trips.emplace_back(f.lo, f.lo, 1.0);
    trips.emplace_back(f.hi, f.hi, 1.0);
    trips.emplace_back(f.lo, f.hi, -1.0);
    trips.emplace_back(f.hi, f.lo, -1.0);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());

  double cell = std::pow(grid.h, grid.dim);
  sol.bulk_fraction = n * cell;
  sol.v.resize(grid.dim);
  sol.residuals.resize(grid.dim);
  for (int k = 0; k < grid.dim; ++k) {
    // d/dv of sum over faces (delta_{k,axis} h - (v_hi - v_lo))^2.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const auto& f : faces) {
      if (f.axis != k) continue;
      rhs[f.hi] += grid.h;
      rhs[f.lo] -= grid.h;
    }
    sol.residuals[k] = solve_projected(A, rhs, tolerance, sol.v[k]);
  }
  return sol;
}

Eigen::MatrixXd compute_a_hat(const CellSolution& sol) {
  const Grid& grid = sol.grid;
  const int dim = grid.dim;
  if (static_cast<int>(sol.v.size()) != dim)
    throw spec_error("cell solution carries the wrong corrector count");
  if (sol.in_bulk.size() != grid.size())
    throw spec_error("cell solution mask does not match its grid");
  const int n = static_cast<int>(sol.node_of_unknown.size());
  for (const auto& v : sol.v)
    if (v.size() != n) throw spec_error("corrector length mismatch");
  if (!(sol.bulk_fraction > 0.0))
    throw spec_error("cell solution has empty bulk");

  std::vector<int> unknown_of_node(grid.size(), -1);
  for (int u = 0; u < n; ++u) unknown_of_node[sol.node_of_unknown[u]] = u;
  auto faces = bulk_faces(grid, sol.in_bulk, unknown_of_node);

  double cell = std::pow(grid.h, dim);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd g(dim);
  for (const auto& f : faces) {
    for (int k = 0; k < dim; ++k) {
      double slope = (sol.v[k][f.hi] - sol.v[k][f.lo]) / grid.h;
      g[k] = (k == f.axis ? 1.0 : 0.0) - slope;
    }
    m += cell * g * g.transpose();
  }
  return m / sol.bulk_fraction;
}

}  // namespace specgap
