#include "specgap/bands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "specgap/design.hpp"
#include "specgap/eigensolver.hpp"
#include "specgap/errors.hpp"
#include "specgap/parallel.hpp"

namespace specgap {

namespace {

// Sample indexing mirrors Grid: axis 0 fastest.
std::array<int, 3> unpack_sample(int t, int m_samples, int dim) {
  std::array<int, 3> q{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    q[d] = t % m_samples;
    t /= m_samples;
  }
  return q;
}

int pack_sample(const std::array<int, 3>& q, int m_samples, int dim) {
  int t = 0;
  for (int d = dim - 1; d >= 0; --d) t = t * m_samples + q[d];
  return t;
}

// Decorrelates per-sample solver starts from the base seed (splitmix64).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t t) {
  std::uint64_t x = base + (t + 1) * 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int sample_count(int m_samples, int dim) {
  int t = 1;
  for (int d = 0; d < dim; ++d) t *= m_samples;
  return t;
}

// Sampling error of a band edge: a smooth extremum lies at most half a step
// from its best sample, so the miss is about a quarter of the adjacent sheet
// increment; jump/8 is the expected half of that worst case.
double edge_estimate(const Eigen::MatrixXd& sheets, int k, int t_star,
                     int m_samples, int dim) {
  auto q = unpack_sample(t_star, m_samples, dim);
  double est = 0.0;
  for (int d = 0; d < dim; ++d) {
    for (int step : {-1, +1}) {
      auto qn = q;
      qn[d] = (q[d] + step + m_samples) % m_samples;
      int tn = pack_sample(qn, m_samples, dim);
      est = std::max(est, std::abs(sheets(t_star, k) - sheets(tn, k)) / 8.0);
    }
  }
  return est;
}

}  // namespace

BandStructure sweep_theta(const PeriodicMedium& med, const Grid& grid,
                          const SweepOptions& opts) {
  if (opts.bands < 1) throw spec_error("sweep needs at least one band");
  if (static_cast<std::size_t>(opts.bands) > grid.size())
    throw spec_error("band count exceeds the fiber dimension " +
                     std::to_string(grid.size()));
  if (opts.samples_per_dim < 1)
    throw spec_error("samples_per_dim must be at least 1");
  if (opts.threads < 1) throw spec_error("threads must be at least 1");

  const int m_samples = opts.samples_per_dim;
  const int dim = grid.dim;
  const int total = sample_count(m_samples, dim);

  // theta and -theta carry conjugate fibers with identical spectra; solve one
  // representative per pair and copy the row across.
  std::vector<int> canon(total);
  std::vector<int> to_solve;
  to_solve.reserve(total);
  for (int t = 0; t < total; ++t) {
    auto q = unpack_sample(t, m_samples, dim);
    std::array<int, 3> qm{0, 0, 0};
    for (int d = 0; d < dim; ++d) qm[d] = (m_samples - q[d]) % m_samples;
    int tm = pack_sample(qm, m_samples, dim);
    canon[t] = std::min(t, tm);
    if (canon[t] == t) to_solve.push_back(t);
  }

  BandStructure bs;
  bs.samples_per_dim = m_samples;
  bs.dim = dim;
  bs.sheets.resize(total, opts.bands);

  parallel_for(to_solve.size(), opts.threads, [&](std::size_t i) {
    const int t = to_solve[i];
    auto q = unpack_sample(t, m_samples, dim);
    std::vector<double> phase(dim);
    for (int d = 0; d < dim; ++d)
      phase[d] = 2.0 * std::numbers::pi * q[d] / m_samples;
    auto op = assemble_bloch(med, grid, phase, opts.shell_mode);
    SolverOptions solver = opts.solver;
    solver.seed = mix_seed(opts.solver.seed, static_cast<std::uint64_t>(t));
    auto res = smallest_k(op, opts.bands, solver);
    for (int k = 0; k < opts.bands; ++k) bs.sheets(t, k) = res.values[k];
  });

  for (int t = 0; t < total; ++t)
    if (canon[t] != t) bs.sheets.row(t) = bs.sheets.row(canon[t]);

  bs.bands.resize(opts.bands);
  for (int k = 0; k < opts.bands; ++k)
    bs.bands[k] = {bs.sheets.col(k).minCoeff(), bs.sheets.col(k).maxCoeff()};
  return bs;
}

GapReport extract_gaps(const BandStructure& bs, double L,
                       double merge_tolerance) {
  if (!(L > 0.0)) throw spec_error("window must be positive");
  if (bs.bands.empty()) throw spec_error("band structure carries no bands");
  if (bs.dim < 1 || bs.dim > 3)
    throw spec_error("band structure dimension out of range");
  if (bs.samples_per_dim < 1)
    throw spec_error("band structure has no theta samples");
  const int n_bands = static_cast<int>(bs.bands.size());
  if (bs.sheets.rows() != sample_count(bs.samples_per_dim, bs.dim) ||
      bs.sheets.cols() != n_bands)
    throw spec_error("sheet matrix does not match the sample lattice");

  // Edge error estimates anchored at the per-sheet extrema.
  std::vector<double> est_lo(n_bands), est_hi(n_bands);
  for (int k = 0; k < n_bands; ++k) {
    int t_min = 0, t_max = 0;
    bs.sheets.col(k).minCoeff(&t_min);
    bs.sheets.col(k).maxCoeff(&t_max);
    est_lo[k] = edge_estimate(bs.sheets, k, t_min, bs.samples_per_dim, bs.dim);
    est_hi[k] = edge_estimate(bs.sheets, k, t_max, bs.samples_per_dim, bs.dim);
  }

  // The top sheet must clear the window for the cover to be trustworthy.
  double top_min = bs.sheets.col(n_bands - 1).minCoeff();
  if (!(top_min > L))
    throw window_error("top sheet reaches down to " + std::to_string(top_min) +
                       " inside the window; raise the band count");

  std::vector<int> order(n_bands);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return bs.bands[a].lo < bs.bands[b].lo;
  });

  const double base = 1e-3 * L;
  double reported = merge_tolerance > 0.0 ? merge_tolerance : base;

  GapReport rep;
  rep.window = L;

  struct Segment {
    double lo, hi;
    double est;  // edge estimate at hi
  };
  Segment cur{0.0, 0.0, 0.0};
  bool have_cur = false;

  auto emit_covered = [&](const Segment& s) {
    if (s.lo >= L) return;
    rep.covered.push_back({s.lo, std::min(s.hi, L)});
  };

  // Decide a candidate gap (cur.hi, lo_next); closing it merges the cover.
  // A spurious gap between overlapping bands is at most the sum of the two
  // edge sampling errors wide, so three times that sum is a safe threshold.
  auto gap_survives = [&](double g_lo, double g_hi, double est_sum) {
    g_hi = std::min(g_hi, L);
    if (g_lo >= L || g_hi <= g_lo) return false;
    double threshold = merge_tolerance > 0.0
                           ? merge_tolerance
                           : std::max(base, 3.0 * est_sum);
    if (merge_tolerance <= 0.0) reported = std::max(reported, threshold);
    return g_hi - g_lo > threshold;
  };

  for (int idx : order) {
    const Interval& band = bs.bands[idx];
    if (!have_cur) {
      // Leading gap below the first band; only its upper edge carries noise.
      if (band.lo > 0.0 && gap_survives(0.0, band.lo, est_lo[idx])) {
        rep.gaps.push_back({0.0, std::min(band.lo, L)});
        cur = {band.lo, band.hi, est_hi[idx]};
      } else {
        cur = {0.0, band.hi, est_hi[idx]};
      }
      have_cur = true;
      continue;
    }
    if (band.lo <= cur.hi) {
      if (band.hi > cur.hi) {
        cur.hi = band.hi;
        cur.est = est_hi[idx];
      }
      continue;
    }
    if (gap_survives(cur.hi, band.lo, cur.est + est_lo[idx])) {
      emit_covered(cur);
      rep.gaps.push_back({cur.hi, std::min(band.lo, L)});
      cur = {band.lo, band.hi, est_hi[idx]};
    } else {
      cur.hi = band.hi;
      cur.est = est_hi[idx];
    }
  }
  if (have_cur) emit_covered(cur);

  rep.merge_tolerance = reported;
  return rep;
}

ConvergenceStudy convergence_study(const GapSpec& spec,
                                   const UnitCellGeometry& geom, double gamma,
                                   const StudyOptions& opts) {
  // count 0 is the constant-medium control: nothing to design, the whole
  // window must come back gap-free.
  if (spec.count() > 0)
    spec.validate();
  else if (!(spec.window > 0.0))
    throw spec_error("window L must be positive");
  if (opts.epsilons.empty()) throw spec_error("no epsilons to study");
  for (double eps : opts.epsilons)
    if (!(eps > 0.0 && eps < 1.0))
      throw spec_error("epsilon " + std::to_string(eps) +
                       " outside (0, 1)");
  if (opts.grid_n < 0) throw spec_error("grid_n must be nonnegative");
  if (opts.grid_n_max < 2) throw spec_error("grid_n_max must be at least 2");
  if (opts.bands < 0) throw spec_error("bands must be nonnegative");

  MediumCoefficients coeffs;
  ConvergenceStudy study;
  if (spec.count() > 0) {
    coeffs = design_coefficients(spec, geom);
    study.limit = compute_sigma_rho(coeffs, geom);
  } else if (geom.count() != 0) {
    throw geometry_error("need exactly one inclusion per target interval");
  }
  coeffs.gamma = gamma;

  const double L = spec.window;
  const int m = static_cast<int>(spec.count());

  for (double eps : opts.epsilons) {
    auto med = PeriodicMedium::make(geom, coeffs, eps);

    int n = opts.grid_n;
    if (n == 0) {
      if (med.delta > 0.0) {
        // Smallest power of two resolving the shell directly, capped; past
        // the cap the sweep falls back to the snapped shell.
        n = 2;
        while (n * med.delta < 3.0 && 2 * n <= opts.grid_n_max) n *= 2;
      } else {
        // No shell to resolve. A constant medium only needs enough cells to
        // keep the stencil dispersion error out of the low bands.
        n = std::min(32, opts.grid_n_max);
      }
    }
    Grid grid(geom.dim, n);

    std::optional<ShellMode> forced;
    if (opts.force_mode) forced = opts.forced_mode;
    auto resolution = validate_resolution(med, grid, forced);

    SweepOptions sweep;
    sweep.samples_per_dim = opts.samples_per_dim;
    sweep.threads = opts.threads;
    sweep.solver = opts.solver;
    sweep.shell_mode = forced;

    const int cap =
        static_cast<int>(std::min<std::size_t>(grid.size(), 512));
    int bands = opts.bands > 0 ? opts.bands : 4 * m + 6;

    BandStructure bs;
    GapReport gaps;
    for (;;) {
      sweep.bands = std::min(bands, cap);
      bs = sweep_theta(med, grid, sweep);
      try {
        gaps = extract_gaps(bs, L, opts.merge_tolerance);
        break;
      } catch (const window_error&) {
        // A fixed band count is the caller's choice; otherwise escalate until
        // the cap, then give up.
        if (opts.bands > 0 || sweep.bands >= cap) throw;
        bands = static_cast<int>(std::ceil(bands * 1.5));
      }
    }

    ConvergenceRow row;
    row.epsilon = eps;
    row.grid_n = n;
    row.mode = resolution.mode;
    row.bands = sweep.bands;
    row.structure = std::move(bs);
    row.gaps = gaps.gaps;
    row.report = std::move(gaps);
    row.lo_error.assign(m, std::numeric_limits<double>::infinity());
    row.hi_error.assign(m, std::numeric_limits<double>::infinity());
    for (int j = 0; j < m; ++j) {
      double best_overlap = 0.0;
      for (const auto& gap : row.gaps) {
        double overlap = std::min(gap.hi, spec.beta[j]) -
                         std::max(gap.lo, spec.alpha[j]);
        if (overlap > best_overlap) {
          best_overlap = overlap;
          row.lo_error[j] = std::abs(gap.lo - spec.alpha[j]) / spec.alpha[j];
          row.hi_error[j] = std::abs(gap.hi - spec.beta[j]) / spec.beta[j];
        }
      }
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

EnclosureReport enclosure_check(const PeriodicMedium& med, const Grid& grid,
                                std::span<const double> phase, int k,
                                double slack, const SolverOptions& opts) {
  if (k < 1) throw spec_error("enclosure check needs at least one eigenvalue");
  if (!(slack >= 0.0)) throw spec_error("slack must be nonnegative");

  auto bloch = smallest_k(assemble_bloch(med, grid, phase), k, opts);
  auto neumann = smallest_k(assemble_neumann(med, grid), k, opts);
  auto dirichlet = smallest_k(assemble_dirichlet(med, grid), k, opts);

  EnclosureReport rep;
  rep.neumann = std::move(neumann.values);
  rep.bloch = std::move(bloch.values);
  rep.dirichlet = std::move(dirichlet.values);
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    rep.worst_violation = std::max(
        {rep.worst_violation, rep.neumann[i] - rep.bloch[i],
         rep.bloch[i] - rep.dirichlet[i]});
  }
  rep.ok = rep.worst_violation <= slack;
  return rep;
}

}  // namespace specgap
