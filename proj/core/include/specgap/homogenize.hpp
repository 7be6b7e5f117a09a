#pragma once

#include <Eigen/Dense>
#include <vector>

#include "specgap/geometry.hpp"
#include "specgap/grid.hpp"

namespace specgap {

// Discrete periodic cell correctors v_k on the perforated grid (nodes outside
// every ball): minimizers of sum over bulk faces of |grad(x_k - v)|^2, which
// is the staircase form of: Laplace v_k = 0 in F, dv_k/dn = n_k on the ball
// boundaries, v_k periodic. Mean-free. The problem involves only the
// geometry, never the medium coefficients.
struct CellSolution {
  Grid grid;
  std::vector<char> in_bulk;            // node mask
  std::vector<Eigen::VectorXd> v;       // dim correctors on bulk nodes (packed)
  std::vector<int> node_of_unknown;     // packed index -> grid node
  std::vector<double> residuals;        // final CG residuals per corrector
  double bulk_fraction = 0.0;           // discrete |F|
};

CellSolution solve_cell_problem(const UnitCellGeometry& geom, const Grid& grid,
                                double tolerance = 1e-10);

// Effective matrix a^kl = (1/|F|) sum over bulk faces of the gradient
// products of (x_k - v_k) and (x_l - v_l). Symmetric positive definite with
// diagonal entries in (0, 1].
Eigen::MatrixXd compute_a_hat(const CellSolution& sol);

}  // namespace specgap
