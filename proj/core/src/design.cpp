#include "specgap/design.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "specgap/errors.hpp"

namespace specgap {

namespace {

double secular_raw(double lambda, std::span<const double> sigma,
                   std::span<const double> rho) {
  double s = 1.0;
  for (std::size_t j = 0; j < sigma.size(); ++j)
    s += rho[j] / (sigma[j] - lambda);
  return s;
}

double secular_derivative(double lambda, std::span<const double> sigma,
                          std::span<const double> rho) {
  double s = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    double d = sigma[j] - lambda;
    s += rho[j] / (d * d);
  }
  return s;
}

// Bisection to near machine width followed by a couple of Newton steps.
// f(lo) <= 0 <= f(hi) must hold on entry.
template <typename F, typename DF>
double refine_root(F f, DF df, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at roundoff width
    double fm = f(mid);
    if ((fm <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double d = df(x);
    if (d == 0.0) break;
    double step = f(x) / d;
    double next = x - step;
    if (next <= lo || next >= hi) break;
    x = next;
  }
  return x;
}

void check_sigma_rho(std::span<const double> sigma,
                     std::span<const double> rho) {
  if (sigma.empty() || sigma.size() != rho.size())
    throw spec_error("sigma and rho must be non-empty and equally sized");
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    if (!(sigma[j] > 0.0)) throw spec_error("sigma must be positive");
    if (!(rho[j] > 0.0)) throw spec_error("rho must be positive");
    if (j > 0 && !(sigma[j] > sigma[j - 1]))
      throw spec_error("sigma must be strictly ascending");
  }
}

}  // namespace

void GapSpec::validate() const {
  std::size_t m = alpha.size();
  if (m == 0) throw spec_error("at least one target interval is required");
  if (beta.size() != m)
    throw spec_error("alpha and beta must have the same length");
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(alpha[j]) || !std::isfinite(beta[j]))
      throw spec_error("targets must be finite");
    if (j == 0 && !(alpha[0] > 0.0))
      throw spec_error("alpha_1 must be positive");
    if (!(alpha[j] < beta[j]))
      throw spec_error("interval " + std::to_string(j + 1) +
                       " needs alpha < beta");
    if (j > 0 && !(beta[j - 1] < alpha[j]))
      throw spec_error("intervals " + std::to_string(j) + " and " +
                       std::to_string(j + 1) + " must be disjoint, ascending");
  }
  if (!(window > beta.back()))
    throw spec_error("window L must exceed beta_m");
}

MediumCoefficients design_coefficients(const GapSpec& spec,
                                       const UnitCellGeometry& geom) {
  spec.validate();
  std::size_t m = spec.count();
  if (geom.count() != m)
    throw geometry_error("need exactly one inclusion per target interval");
  double surf = ball_surface(geom);
  double vol_f = bulk_volume(geom);
  if (!(vol_f > 0.0))
    throw geometry_error("inclusions fill the whole cell, |F| <= 0");

  MediumCoefficients out;
  out.a.resize(m);
  out.b.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double prod = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      prod *= (spec.beta[i] - spec.alpha[j]) / (spec.alpha[i] - spec.alpha[j]);
    }
    double width = spec.beta[j] - spec.alpha[j];
    out.a[j] = vol_f / surf * width * prod;
    out.b[j] = static_cast<double>(geom.dim) * vol_f /
               (geom.radius * surf) * (width / spec.alpha[j]) * prod;
    if (!(out.a[j] > 0.0) || !(out.b[j] > 0.0))
      throw spec_error("designed coefficients came out non-positive; "
                       "the spec is not interlaced");
  }
  return out;
}

LimitSpectrum compute_sigma_rho(const MediumCoefficients& coeffs,
                                const UnitCellGeometry& geom) {
  std::size_t m = geom.count();
  if (m == 0) throw spec_error("medium has no inclusions");
  if (coeffs.a.size() != m || coeffs.b.size() != m)
    throw spec_error("coefficient arrays must have one entry per inclusion");
  if (!(geom.radius > 0.0))
    throw geometry_error("inclusion radius must be positive");
  double surf = ball_surface(geom);
  double vol_f = bulk_volume(geom);
  if (!(vol_f > 0.0)) throw geometry_error("|F| <= 0");

  std::vector<double> sigma(m), rho(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(coeffs.a[j] > 0.0) || !(coeffs.b[j] > 0.0))
      throw spec_error("coefficients a, b must be positive");
    sigma[j] = static_cast<double>(geom.dim) * coeffs.a[j] /
               (geom.radius * coeffs.b[j]);
    rho[j] = coeffs.a[j] * surf / vol_f;
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return sigma[i] < sigma[j]; });

  LimitSpectrum ls;
  ls.sigma.resize(m);
  ls.rho.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    ls.sigma[j] = sigma[order[j]];
    ls.rho[j] = rho[order[j]];
  }
  double scale = ls.sigma.back() - ls.sigma.front() + 1.0;
  for (std::size_t j = 1; j < m; ++j) {
    if (ls.sigma[j] - ls.sigma[j - 1] <= 1e-12 * scale)
      throw degenerate_error(
          "two inclusions share the resonance sigma = " +
          std::to_string(ls.sigma[j]) +
          "; the gap structure between them is undefined");
  }
  ls.mu = find_mu(ls.sigma, ls.rho);
  return ls;
}

double eval_secular(double lambda, std::span<const double> sigma,
                    std::span<const double> rho) {
  check_sigma_rho(sigma, rho);
  double guard = 1e-10 * (sigma.back() - sigma.front() + 1.0);
  for (double s : sigma) {
    if (std::abs(lambda - s) <= guard)
      throw pole_error("lambda = " + std::to_string(lambda) +
                       " is numerically on the pole sigma = " +
                       std::to_string(s));
  }
  return secular_raw(lambda, sigma, rho);
}

double eval_secular(double lambda, const LimitSpectrum& ls) {
  return eval_secular(lambda, ls.sigma, ls.rho);
}

std::vector<double> find_mu(std::span<const double> sigma,
                            std::span<const double> rho) {
  check_sigma_rho(sigma, rho);
  std::size_t m = sigma.size();
  if (m == 1) return {sigma[0] + rho[0]};  // 1 + rho/(sigma-mu) = 0

  double rho_sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  double scale = sigma.back() - sigma.front() + 1.0;
  double dp = 1e-12 * scale;

  auto f = [&](double x) { return secular_raw(x, sigma, rho); };
  auto df = [&](double x) { return secular_derivative(x, sigma, rho); };

  std::vector<double> mu(m);
  for (std::size_t j = 0; j < m; ++j) {
    // F rises from -inf at sigma_j^+ through the single root of the panel
    double lo = sigma[j] + dp;
    double hi = j + 1 < m ? sigma[j + 1] - dp : sigma[j] + rho_sum;
    mu[j] = refine_root(f, df, lo, hi);
  }
  return mu;
}

std::vector<double> solve_gap_system_oracle(const GapSpec& spec) {
  spec.validate();
  int m = static_cast<int>(spec.count());
  Eigen::MatrixXd cauchy(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      cauchy(k, j) = 1.0 / (spec.beta[k] - spec.alpha[j]);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd rho = cauchy.fullPivLu().solve(rhs);
  return {rho.data(), rho.data() + m};
}

std::vector<Interval> limit_spectrum(const LimitSpectrum& ls, double L) {
  check_sigma_rho(ls.sigma, ls.rho);
  if (ls.mu.size() != ls.sigma.size())
    throw spec_error("limit spectrum is missing its mu values");
  if (!(L > ls.mu.back()))
    throw window_error("window L = " + std::to_string(L) +
                       " does not reach past mu_m = " +
                       std::to_string(ls.mu.back()));
  std::vector<Interval> bands;
  bands.push_back({0.0, ls.sigma[0]});
  for (std::size_t j = 1; j < ls.sigma.size(); ++j)
    bands.push_back({ls.mu[j - 1], ls.sigma[j]});
  bands.push_back({ls.mu.back(), L});
  return bands;
}

std::vector<double> limit_dispersion(double s, const LimitSpectrum& ls) {
  check_sigma_rho(ls.sigma, ls.rho);
  if (!(s >= 0.0)) throw spec_error("dispersion level s must be >= 0");
  std::size_t m = ls.sigma.size();

  if (s == 0.0) {
    // lambda F(lambda) = 0 factors exactly
    std::vector<double> roots{0.0};
    auto mu = ls.mu.size() == m ? ls.mu : find_mu(ls.sigma, ls.rho);
    roots.insert(roots.end(), mu.begin(), mu.end());
    return roots;
  }

  double rho_sum = std::accumulate(ls.rho.begin(), ls.rho.end(), 0.0);
  double scale = ls.sigma.back() - ls.sigma.front() + 1.0;
  double dp = 1e-12 * scale;

  auto g = [&](double x) { return x * secular_raw(x, ls.sigma, ls.rho) - s; };
  auto dg = [&](double x) {
    return secular_raw(x, ls.sigma, ls.rho) +
           x * secular_derivative(x, ls.sigma, ls.rho);
  };

  std::vector<double> roots;
  roots.reserve(m + 1);
  // [0, sigma_1): g(0) = -s < 0, g -> +inf at the pole
  roots.push_back(refine_root(g, dg, 0.0, ls.sigma[0] - dp));
  for (std::size_t j = 0; j + 1 < m; ++j)
    roots.push_back(refine_root(g, dg, ls.sigma[j] + dp, ls.sigma[j + 1] - dp));
  // beyond the last pole g climbs back through s before sigma_m + rho_sum + s + 1
  double top = ls.sigma.back() + rho_sum + s + 1.0;
  roots.push_back(refine_root(g, dg, ls.sigma.back() + dp, top));
  return roots;
}

}  // namespace specgap
