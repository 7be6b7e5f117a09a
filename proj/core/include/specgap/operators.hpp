#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "specgap/geometry.hpp"
#include "specgap/grid.hpp"

namespace specgap {

using Complex = std::complex<double>;
using SparseHermitian = Eigen::SparseMatrix<Complex>;

// How the shell is put on the grid. direct: sample the coefficients at the
// nodes as they are (needs h <= delta/3). snap: replace the shell by one
// radial layer of cells carrying a_j * h, preserving the areal conductance
// value/thickness = a_j that sets the resonances.
enum class ShellMode { direct, snap };

struct ResolutionReport {
  ShellMode mode = ShellMode::direct;
  double delta = 0.0;        // physical shell thickness
  double shell_width = 0.0;  // width represented on the grid
  double cells_across = 0.0; // delta / h
};

// Decides direct vs snap for a medium/grid pair. Tie delta == 3h goes to
// direct. A medium without inclusions is always direct. Passing `forced`
// overrides the policy (diagnostics only, the geometry checks still run).
ResolutionReport validate_resolution(const PeriodicMedium& med, const Grid& grid,
                                     std::optional<ShellMode> forced = {});

// Per-node coefficient samples honoring the resolution mode. Only a differs
// between modes; b is the pointwise sample either way.
struct CoefficientField {
  Eigen::VectorXd a, b;
  ResolutionReport res;
};

CoefficientField sample_coefficients(const PeriodicMedium& med, const Grid& grid,
                                     std::optional<ShellMode> forced = {});

// Discrete fiber operator pair (A, B): A is the stiffness with the 2*dim+1
// point stencil, harmonic-mean face transmissibilities and phase factors on
// the wrap faces; B is the diagonal of node values of b. Quasi-periodic
// condition u(y + e_d) = exp(i phase_d) u(y).
struct CellOperator {
  SparseHermitian stiffness;
  Eigen::VectorXd mass;
  std::array<double, 3> phase{0.0, 0.0, 0.0};
  ShellMode mode = ShellMode::direct;
};

CellOperator assemble_bloch(const PeriodicMedium& med, const Grid& grid,
                            std::span<const double> phase,
                            std::optional<ShellMode> forced = {});

// Same interior stencil. Dirichlet keeps the boundary half-face coupling to a
// zero ghost value on the cell boundary; Neumann drops boundary flux. The
// three variants share transmissibilities, so the min-max bracketing
// lambda^N_k <= lambda^theta_k <= lambda^D_k holds exactly in the discrete
// setting as well.
CellOperator assemble_dirichlet(const PeriodicMedium& med, const Grid& grid,
                                std::optional<ShellMode> forced = {});
CellOperator assemble_neumann(const PeriodicMedium& med, const Grid& grid,
                              std::optional<ShellMode> forced = {});

// Closed-form eigenvalues of the constant-coefficient wrapped stencil,
// (4/h^2) sum_d sin^2((2 pi m_d + phase_d) h / 2) over all m, ascending.
// Verification aid for the assembly and the eigensolver.
std::vector<double> constant_dispersion(const Grid& grid,
                                        std::span<const double> phase,
                                        double a_value = 1.0,
                                        double b_value = 1.0);

// Piecewise-constant radial coefficient profile on (0, outer).
struct RadialProfile {
  int dim = 2;                  // n in the weight rho^(n-1)
  double outer = 0.0;           // R
  std::vector<double> breaks;   // ascending interior breakpoints < R
  std::vector<double> a_vals;   // size breaks.size() + 1
  std::vector<double> b_vals;   // segment s covers (breaks[s-1], breaks[s])
};

// Profile of the one-inclusion auxiliary domain of radius r + kappa around
// inclusion j: bulk inside the ball, shell layer, bulk annulus outside.
RadialProfile radial_profile(const PeriodicMedium& med, int inclusion);

// a = b = 1 throughout; lowest Dirichlet eigenvalue is (j_{0,1}/R)^2 in 2d.
RadialProfile unit_radial_profile(int dim, double outer);

// Finite-volume discretization of
//   -(1 / (b rho^(n-1))) d/drho ( a rho^(n-1) d/drho )
// on (0, R), natural at 0, Dirichlet at R, self-adjoint with weight
// b rho^(n-1). Face transmissibilities use the exact integral of
// 1/(a rho^(n-1)) between nodes, so layer conductances are exact regardless
// of where the breakpoints fall relative to the grid.
struct RadialOperator {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
  double h = 0.0;
};

RadialOperator assemble_radial(const RadialProfile& prof, int cells);

}  // namespace specgap
