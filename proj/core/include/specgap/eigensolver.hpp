#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "specgap/operators.hpp"

namespace specgap {

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  // Preconditioner for the block iteration. jacobi needs no setup; ldlt
  // factors stiffness + shift * mass once per operator and converges in far
  // fewer iterations on stiff media.
  enum class Preconditioner { jacobi, ldlt };
  Preconditioner preconditioner = Preconditioner::ldlt;
  // Shift used by the ldlt preconditioner; <= 0 picks one from the matrix
  // scale. Roughly the magnitude of the wanted eigenvalues.
  double shift = 0.0;
};

struct EigenResult {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // scaled |A u - lambda B u| per pair
  int iterations = 0;
};

// k smallest eigenvalues of A u = lambda B u with A sparse Hermitian PSD and
// B diagonal positive, by a preconditioned block (LOBPCG type) iteration on
// B^(-1/2) A B^(-1/2) with a fixed-seed start. Deterministic for a fixed
// seed. Throws solver_error with the best residuals when the iteration
// budget runs out.
EigenResult smallest_k(const SparseHermitian& A, const Eigen::VectorXd& B,
                       int k, const SolverOptions& opts = {});

EigenResult smallest_k(const CellOperator& op, int k,
                       const SolverOptions& opts = {});

// Full spectrum through dense Hermitian reduction; dimension capped at 2000.
// Reference route for tests.
std::vector<double> dense_oracle(const SparseHermitian& A,
                                 const Eigen::VectorXd& B);

}  // namespace specgap
