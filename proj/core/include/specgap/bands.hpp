#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "specgap/design.hpp"
#include "specgap/eigensolver.hpp"
#include "specgap/geometry.hpp"
#include "specgap/grid.hpp"
#include "specgap/operators.hpp"

namespace specgap {

// Quasi-momentum samples phase_d = 2 pi q_d / M on the torus and the
// eigenvalue sheets over them. sheets(t, k) is the k-th eigenvalue at sample
// t; rows follow the row-major order of q. Complex conjugate momenta carry
// identical spectra, so only canonical representatives are solved and the
// rest is mirrored.
struct BandStructure {
  int samples_per_dim = 0;  // M
  int dim = 0;
  Eigen::MatrixXd sheets;
  std::vector<Interval> bands;  // [min_theta lambda_k, max_theta lambda_k]
};

struct SweepOptions {
  int bands = 8;            // K
  int samples_per_dim = 8;  // M
  int threads = 1;
  std::optional<ShellMode> shell_mode{};  // override the resolution policy
  SolverOptions solver;
};

BandStructure sweep_theta(const PeriodicMedium& med, const Grid& grid,
                          const SweepOptions& opts);

// Gap extraction over [0, L]. Gaps narrower than the merge tolerance are
// treated as band overlap noise and closed. tolerance <= 0 picks, per
// candidate gap, max(1e-3 L, 3 * the summed edge error estimates of the two
// bounding extrema), each estimate read off the sheet increments next to
// that extremum; the report carries the largest threshold consulted. Throws
// window_error unless min_theta lambda_K > L (the window is not resolved by
// K bands otherwise).
struct GapReport {
  double window = 0.0;
  double merge_tolerance = 0.0;
  std::vector<Interval> gaps;
  std::vector<Interval> covered;  // merged band cover of [0, window]
};

GapReport extract_gaps(const BandStructure& bs, double L,
                       double merge_tolerance = 0.0);

// One finite-epsilon verification row against the design targets.
struct ConvergenceRow {
  double epsilon = 0.0;
  int grid_n = 0;
  ShellMode mode = ShellMode::direct;
  int bands = 0;
  BandStructure structure;  // sheets at the band count that resolved L
  GapReport report;
  std::vector<Interval> gaps;  // = report.gaps
  // per target j: relative end point errors of the matched gap, or +inf when
  // no gap matched target j
  std::vector<double> lo_error, hi_error;
};

struct ConvergenceStudy {
  LimitSpectrum limit;
  std::vector<ConvergenceRow> rows;
};

struct StudyOptions {
  std::vector<double> epsilons;
  int grid_n = 128;              // 0: smallest power of two with h <= delta/3
  int grid_n_max = 256;
  ShellMode forced_mode{};       // only used when force_mode
  bool force_mode = false;
  int samples_per_dim = 8;
  int bands = 0;                 // 0: start at 4m+6, escalate x1.5
  int threads = 1;
  SolverOptions solver;
  double merge_tolerance = 0.0;  // 0: automatic
};

// Designs the medium for the spec, then for each epsilon assembles, sweeps,
// extracts gaps and scores them against the targets.
ConvergenceStudy convergence_study(const GapSpec& spec,
                                   const UnitCellGeometry& geom, double gamma,
                                   const StudyOptions& opts);

// Discrete min-max bracketing lambda^N_k <= lambda^theta_k <= lambda^D_k.
struct EnclosureReport {
  bool ok = true;
  std::vector<double> neumann, bloch, dirichlet;
  double worst_violation = 0.0;  // positive = broken by that much
};

EnclosureReport enclosure_check(const PeriodicMedium& med, const Grid& grid,
                                std::span<const double> phase, int k,
                                double slack,
                                const SolverOptions& opts = {});

}  // namespace specgap
