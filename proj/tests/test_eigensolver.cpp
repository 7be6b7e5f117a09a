#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "specgap/design.hpp"
#include "specgap/eigensolver.hpp"
#include "specgap/errors.hpp"
#include "specgap/geometry.hpp"
#include "specgap/grid.hpp"
#include "specgap/operators.hpp"

using namespace specgap;

namespace {

SparseHermitian sparse2(double d0, double d1, Complex off) {
  SparseHermitian a(2, 2);
  std::vector<Eigen::Triplet<Complex>> t = {
      {0, 0, Complex(d0, 0)}, {1, 1, Complex(d1, 0)},
      {0, 1, off}, {1, 0, std::conj(off)}};
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

PeriodicMedium stiff_medium(double eps) {
  GapSpec spec;
  spec.alpha = {2.0};
  spec.beta = {5.0};
  spec.window = 8.0;
  UnitCellGeometry geom;
  geom.dim = 2;
  geom.radius = 0.2;
  geom.centers = {{0.5, 0.5, 0.0}};
  auto mc = design_coefficients(spec, geom);
  mc.gamma = 3.4;
  return PeriodicMedium::make(geom, mc, eps);
}

PeriodicMedium line_medium(double bulk) {
  PeriodicMedium med;
  med.geom.dim = 1;
  med.epsilon = 0.5;
  med.bulk_a = bulk;
  return med;
}

}  // namespace

TEST_CASE("dense oracle pins small hermitian pairs") {
  auto a = sparse2(2.0, 2.0, Complex(1.0, 0.0));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  auto vals = dense_oracle(a, ones);
  REQUIRE(vals.size() == 2);
  CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-14));

  Eigen::VectorXd mass(2);
  mass << 4.0, 1.0;  // B^(-1/2) A B^(-1/2) = [[1/2, 1/2], [1/2, 2]]
  auto scaled = dense_oracle(a, mass);
  double disc = std::sqrt(3.25);
  CHECK(scaled[0] == doctest::Approx((2.5 - disc) / 2).epsilon(1e-13));
  CHECK(scaled[1] == doctest::Approx((2.5 + disc) / 2).epsilon(1e-13));

  auto c = sparse2(2.0, 2.0, Complex(0.0, 1.0));  // imaginary coupling
  auto cv = dense_oracle(c, ones);
  CHECK(cv[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cv[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("dense oracle rejects oversized problems") {
  SparseHermitian big(2001, 2001);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2001);
  CHECK_THROWS_AS(dense_oracle(big, ones), spec_error);
}

TEST_CASE("block solver reproduces the dirichlet line spectrum") {
  auto med = line_medium(4.0);
  Grid grid(1, 16);
  auto op = assemble_dirichlet(med, grid);
  SolverOptions opts;
  auto res = smallest_k(op, 4, opts);
  REQUIRE(res.values.size() == 4);
  double pi = 3.14159265358979323846;
  double t = 4.0 / (grid.h * grid.h);
  for (int k = 1; k <= 4; ++k) {
    double s = std::sin(k * pi / 32.0);
    CHECK(res.values[static_cast<std::size_t>(k - 1)] ==
          doctest::Approx(4.0 * t * s * s).epsilon(1e-7));
  }
  for (double r : res.residuals) CHECK(r <= opts.tolerance);
  CHECK(res.iterations >= 1);
}

TEST_CASE("block solver agrees with the dense oracle on a stiff fiber") {
  auto med = stiff_medium(0.25);
  Grid grid(2, 16);
  double phase[2] = {0.9, 2.3};
  auto op = assemble_bloch(med, grid, phase);
  auto exact = dense_oracle(op.stiffness, op.mass);

  SolverOptions opts;
  auto res = smallest_k(op, 6, opts);
  double top = exact[exact.size() - 1];
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(res.values[static_cast<std::size_t>(i)] -
                   exact[static_cast<std::size_t>(i)]) <= 1e-8 * top);

  SolverOptions jac = opts;
  jac.preconditioner = SolverOptions::Preconditioner::jacobi;
  jac.max_iterations = 20000;
  auto rj = smallest_k(op, 6, jac);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(rj.values[static_cast<std::size_t>(i)] -
                   exact[static_cast<std::size_t>(i)]) <= 1e-8 * top);

  SolverOptions shifted = opts;
  shifted.shift = 2.0;
  auto rs = smallest_k(op, 6, shifted);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(rs.values[static_cast<std::size_t>(i)] -
                   exact[static_cast<std::size_t>(i)]) <= 1e-8 * top);
}

TEST_CASE("block solver is deterministic per seed") {
  auto med = stiff_medium(0.3);
  Grid grid(2, 12);
  double phase[2] = {1.1, 0.4};
  auto op = assemble_bloch(med, grid, phase);
  SolverOptions opts;
  opts.seed = 7;
  auto r1 = smallest_k(op, 5, opts);
  auto r2 = smallest_k(op, 5, opts);
  CHECK(r1.iterations == r2.iterations);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r1.values[i] == r2.values[i]);

  opts.seed = 8;
  auto r3 = smallest_k(op, 5, opts);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(r3.values[i] ==
          doctest::Approx(r1.values[i]).epsilon(1e-7).scale(1.0));
}

TEST_CASE("zero stiffness converges to zero immediately") {
  SparseHermitian a(40, 40);
  Eigen::VectorXd mass = Eigen::VectorXd::Ones(40);
  auto res = smallest_k(a, mass, 3);
  for (double v : res.values) CHECK(std::abs(v) <= 1e-12);
  for (double r : res.residuals) CHECK(r <= 1e-12);
}

TEST_CASE("budget exhaustion reports the best residuals") {
  auto med = stiff_medium(0.25);
  Grid grid(2, 16);
  double phase[2] = {0.9, 2.3};
  auto op = assemble_bloch(med, grid, phase);
  SolverOptions opts;
  opts.preconditioner = SolverOptions::Preconditioner::jacobi;
  opts.tolerance = 1e-13;
  opts.max_iterations = 2;
  try {
    smallest_k(op, 4, opts);
    FAIL("expected solver_error");
  } catch (const solver_error& e) {
    REQUIRE(e.best_residuals.size() == 4);
    double worst = 0.0;
    for (double r : e.best_residuals) worst = std::max(worst, r);
    CHECK(worst > 1e-13);
  }
}

TEST_CASE("solver input validation") {
  auto a = sparse2(2.0, 2.0, Complex(1.0, 0.0));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(smallest_k(a, ones, 0), spec_error);
  CHECK_THROWS_AS(smallest_k(a, ones, 3), spec_error);
  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(smallest_k(a, bad, 1), spec_error);
  Eigen::VectorXd wrong = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(smallest_k(a, wrong, 1), spec_error);
  CHECK_THROWS_AS(dense_oracle(a, wrong), spec_error);
}
