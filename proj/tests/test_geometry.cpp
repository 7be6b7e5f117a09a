#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "specgap/errors.hpp"
#include "specgap/geometry.hpp"

using namespace specgap;

namespace {

UnitCellGeometry two_balls() {
  UnitCellGeometry g;
  g.dim = 2;
  g.radius = 0.15;
  g.centers = {{0.25, 0.25, 0.0}, {0.75, 0.75, 0.0}};
  return g;
}

MediumCoefficients simple_coeffs(int m) {
  MediumCoefficients c;
  c.gamma = 3.2;
  for (int j = 0; j < m; ++j) {
    c.a.push_back(1.5);
    c.b.push_back(2.0);
  }
  return c;
}

}  // namespace

TEST_CASE("measures in 2d and 3d") {
  auto g = two_balls();
  CHECK(ball_volume(g) ==
        doctest::Approx(std::numbers::pi * 0.0225).epsilon(1e-15));
  CHECK(ball_surface(g) ==
        doctest::Approx(2.0 * std::numbers::pi * 0.15).epsilon(1e-15));
  CHECK(bulk_volume(g) ==
        doctest::Approx(1.0 - 2.0 * std::numbers::pi * 0.0225).epsilon(1e-15));

  UnitCellGeometry g3;
  g3.dim = 3;
  g3.radius = 0.1;
  g3.centers = {{0.5, 0.5, 0.5}};
  CHECK(ball_volume(g3) ==
        doctest::Approx(4.0 / 3.0 * std::numbers::pi * 1e-3).epsilon(1e-15));
  CHECK(ball_surface(g3) ==
        doctest::Approx(4.0 * std::numbers::pi * 1e-2).epsilon(1e-15));
}

TEST_CASE("kappa frozen example") {
  // boundary margin 0.25 - 0.15 = 0.10; mutual distance sqrt(0.5) - 0.30
  auto g = two_balls();
  double kappa = validate_geometry(g);
  CHECK(kappa == doctest::Approx(0.05).epsilon(1e-12));

  UnitCellGeometry centered;
  centered.dim = 2;
  centered.radius = 0.2;
  centered.centers = {{0.5, 0.5, 0.0}};
  CHECK(validate_geometry(centered) == doctest::Approx(0.15).epsilon(1e-12));

  UnitCellGeometry empty;
  empty.dim = 2;
  empty.radius = 0.1;
  CHECK(validate_geometry(empty) == std::numeric_limits<double>::infinity());
}

TEST_CASE("geometry rejections") {
  UnitCellGeometry pokes_out;
  pokes_out.dim = 2;
  pokes_out.radius = 0.3;
  pokes_out.centers = {{0.25, 0.25, 0.0}};
  CHECK_THROWS_AS(validate_geometry(pokes_out), geometry_error);

  UnitCellGeometry overlap;
  overlap.dim = 2;
  overlap.radius = 0.15;
  overlap.centers = {{0.3, 0.3, 0.0}, {0.5, 0.5, 0.0}};
  CHECK_THROWS_AS(validate_geometry(overlap), geometry_error);

  UnitCellGeometry touching;  // distance exactly 2r is still invalid
  touching.dim = 2;
  touching.radius = 0.125;
  touching.centers = {{0.25, 0.5, 0.0}, {0.5, 0.5, 0.0}};
  CHECK_THROWS_AS(validate_geometry(touching), geometry_error);

  UnitCellGeometry bad_dim;
  bad_dim.dim = 4;
  bad_dim.radius = 0.1;
  bad_dim.centers = {{0.5, 0.5, 0.0}};
  CHECK_THROWS_AS(validate_geometry(bad_dim), geometry_error);
}

TEST_CASE("medium derived quantities") {
  auto med = PeriodicMedium::make(two_balls(), simple_coeffs(2), 0.2);
  CHECK(med.bulk_a == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(med.delta == doctest::Approx(std::pow(0.2, 2.2)).epsilon(1e-15));
  // conductance identity shell_a / delta == a_j, the epsilon-independent
  // quantity the design rests on
  for (int j = 0; j < 2; ++j) {
    CHECK(med.shell_a[j] / med.delta ==
          doctest::Approx(med.coeffs.a[j]).epsilon(4e-16));
  }
}

TEST_CASE("medium rejections") {
  CHECK_THROWS_AS(PeriodicMedium::make(two_balls(), simple_coeffs(2), 0.0),
                  spec_error);
  CHECK_THROWS_AS(PeriodicMedium::make(two_balls(), simple_coeffs(2), 1.0),
                  spec_error);

  auto c = simple_coeffs(2);
  c.gamma = 3.0;  // exponent must exceed 3
  CHECK_THROWS_AS(PeriodicMedium::make(two_balls(), c, 0.2), spec_error);

  c = simple_coeffs(2);
  c.a[1] = -1.0;
  CHECK_THROWS_AS(PeriodicMedium::make(two_balls(), c, 0.2), spec_error);

  c = simple_coeffs(1);  // size mismatch with two inclusions
  CHECK_THROWS_AS(PeriodicMedium::make(two_balls(), c, 0.2), spec_error);

  // delta = eps^(gamma-1) must stay below the inclusion radius
  UnitCellGeometry tiny;
  tiny.dim = 2;
  tiny.radius = 0.05;
  tiny.centers = {{0.5, 0.5, 0.0}};
  auto c1 = simple_coeffs(1);
  c1.gamma = 3.2;
  CHECK_THROWS_AS(PeriodicMedium::make(tiny, c1, 0.5), spec_error);
}

TEST_CASE("classification boundary conventions") {
  auto med = PeriodicMedium::make(two_balls(), simple_coeffs(2), 0.2);
  double r = 0.15;
  double d = med.delta;

  double center[2] = {0.25, 0.25};
  auto tag = classify_point(center, med);
  CHECK(tag.region == Region::inclusion);
  CHECK(tag.index == 0);

  double inner[2] = {0.25 + (r - d) - 1e-12, 0.25};
  CHECK(classify_point(inner, med).region == Region::inclusion);

  double in_shell[2] = {0.25 + r - 0.5 * d, 0.25};
  tag = classify_point(in_shell, med);
  CHECK(tag.region == Region::shell);
  CHECK(tag.index == 0);

  double shell_inner[2] = {0.25 + (r - d) + 1e-12, 0.25};
  CHECK(classify_point(shell_inner, med).region == Region::shell);

  double outside[2] = {0.25 + r + 1e-9, 0.25};
  CHECK(classify_point(outside, med).region == Region::bulk);

  double second[2] = {0.75, 0.75};
  tag = classify_point(second, med);
  CHECK(tag.region == Region::inclusion);
  CHECK(tag.index == 1);
}

TEST_CASE("closed boundaries belong inward") {
  // Exactly representable data so the sphere radii are hit without rounding:
  // radius 1/4, delta 1/16, center at 1/2.
  PeriodicMedium med;
  med.geom.dim = 2;
  med.geom.radius = 0.25;
  med.geom.centers = {{0.5, 0.5, 0.0}};
  med.coeffs.a = {1.0};
  med.coeffs.b = {2.0};
  med.coeffs.gamma = 4.0;
  med.epsilon = 0.5;
  med.bulk_a = 4.0;
  med.delta = 0.0625;
  med.shell_a = {0.0625};

  double at_inner[2] = {0.5 + 0.1875, 0.5};  // |y-x| = r - delta -> inclusion
  CHECK(classify_point(at_inner, med).region == Region::inclusion);

  double at_outer[2] = {0.75, 0.5};  // |y-x| = r -> shell
  CHECK(classify_point(at_outer, med).region == Region::shell);

  double past[2] = {0.75 + 1e-12, 0.5};
  CHECK(classify_point(past, med).region == Region::bulk);
}

TEST_CASE("coefficient evaluation frozen values") {
  auto med = PeriodicMedium::make(two_balls(), simple_coeffs(2), 0.2);

  double far[2] = {0.05, 0.95};
  CHECK(eval_a(far, med) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(eval_b(far, med) == doctest::Approx(1.0).epsilon(1e-15));

  // shell of inclusion 1: a_1 eps^(gamma-1) = 1.5 * 0.2^2.2
  double in_shell[2] = {0.25 + 0.15 - 0.5 * med.delta, 0.25};
  CHECK(eval_a(in_shell, med) ==
        doctest::Approx(1.5 * std::pow(0.2, 2.2)).epsilon(1e-14));
  CHECK(eval_b(in_shell, med) == doctest::Approx(2.0).epsilon(1e-15));

  // ball interior keeps the bulk conductivity, density switches to b_j
  double center[2] = {0.25, 0.25};
  CHECK(eval_a(center, med) == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(eval_b(center, med) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("conductance identity across an epsilon sweep") {
  for (double eps : {0.4, 0.3, 0.25, 0.2, 0.1, 0.05, 0.02}) {
    auto med = PeriodicMedium::make(two_balls(), simple_coeffs(2), eps);
    for (int j = 0; j < 2; ++j) {
      double cond = med.shell_a[j] / med.delta;
      CHECK(std::abs(cond - med.coeffs.a[j]) <=
            4e-16 * std::abs(med.coeffs.a[j]));
    }
  }
}
