#pragma once

#include <span>
#include <utility>
#include <vector>

#include "specgap/geometry.hpp"

namespace specgap {

// Target band gaps (alpha_j, beta_j), disjoint and ascending inside the
// spectral window [0, L].
struct GapSpec {
  std::vector<double> alpha, beta;
  double window = 0.0;  // L

  std::size_t count() const { return alpha.size(); }
  // Throws spec_error naming the offending field.
  void validate() const;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Resonance data of the limiting operator: poles sigma_j (ascending), weights
// rho_j, and the roots mu_j of the secular function, interlaced
// sigma_1 < mu_1 < ... < sigma_m < mu_m.
struct LimitSpectrum {
  std::vector<double> sigma, rho, mu;

  std::size_t count() const { return sigma.size(); }
};

// Closed-form medium coefficients that realize the requested gaps:
//   a_j = |F|/|dB_j| (beta_j - alpha_j) prod_{i != j} (beta_i - alpha_j)/(alpha_i - alpha_j)
//   b_j = n |F| / (r |dB_j|) (beta_j - alpha_j)/alpha_j prod_{i != j} ...
// Both come out positive for a valid interlaced spec.
MediumCoefficients design_coefficients(const GapSpec& spec,
                                       const UnitCellGeometry& geom);

// Resonances sigma_j = n a_j / (r b_j) and weights rho_j = a_j |dB_j| / |F|
// of a given medium, sorted by sigma ascending (rho permuted along). Throws
// degenerate_error when two sigma collide.
LimitSpectrum compute_sigma_rho(const MediumCoefficients& coeffs,
                                const UnitCellGeometry& geom);

// Secular function F(lambda) = 1 + sum_j rho_j / (sigma_j - lambda). Throws
// pole_error within pole_guard of a sigma_j.
double eval_secular(double lambda, std::span<const double> sigma,
                    std::span<const double> rho);
double eval_secular(double lambda, const LimitSpectrum& ls);

// All m roots of the secular function, one per interval (sigma_j, sigma_j+1)
// plus one in (sigma_m, sigma_m + sum rho]. Bisection brackets then Newton.
std::vector<double> find_mu(std::span<const double> sigma,
                            std::span<const double> rho);

// Dense solve of the linear system sum_j rho_j / (beta_k - alpha_j) = 1,
// k = 1..m, the independent route to the weights used by the product formula
// inside design_coefficients. Test oracle.
std::vector<double> solve_gap_system_oracle(const GapSpec& spec);

// Bands [0,sigma_1], [mu_1,sigma_2], ..., [mu_m, L] of the limiting operator
// clipped to [0, L]. Throws window_error when L <= mu_m.
std::vector<Interval> limit_spectrum(const LimitSpectrum& ls, double L);

// The m+1 ascending roots of lambda F(lambda) = s for s >= 0; the limiting
// fiber eigenvalues at dispersion level s. For s = 0 this is {0, mu_1..mu_m}.
std::vector<double> limit_dispersion(double s, const LimitSpectrum& ls);

}  // namespace specgap
