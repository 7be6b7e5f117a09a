#include "specgap/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "specgap/bands.hpp"
#include "specgap/design.hpp"
#include "specgap/eigensolver.hpp"
#include "specgap/errors.hpp"
#include "specgap/geometry.hpp"
#include "specgap/homogenize.hpp"
#include "specgap/operators.hpp"

namespace specgap {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double, so the CSV
// echoes config inputs verbatim and reruns stay byte-identical.
std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string band_file(double eps) {
  return "bands_eps" + fmt_short(eps) + ".csv";
}

std::string band_file_list(const std::vector<double>& epsilons) {
  std::string s;
  for (double eps : epsilons) {
    if (!s.empty()) s += ", ";
    s += band_file(eps);
  }
  return s;
}

std::string list_short(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ", ";
    s += fmt_short(x);
  }
  return "[" + s + "]";
}

std::string mode_name(ShellMode mode) {
  return mode == ShellMode::snap ? "snap" : "direct";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path.string());
  out << text;
}

std::string dumped(const json& doc) { return doc.dump(2) + "\n"; }

json intervals_json(const std::vector<Interval>& v) {
  json arr = json::array();
  for (const auto& iv : v) arr.push_back(json::array({iv.lo, iv.hi}));
  return arr;
}

// Coefficients plus the targets the run is scored against. Explicit
// coefficients take precedence; their own limit gaps (sigma_j, mu_j) become
// the targets. Without them the targets are designed for, and the designed
// medium must reproduce alpha and beta or the command fails.
struct Problem {
  MediumCoefficients coeffs;
  GapSpec spec;
  LimitSpectrum limit;  // empty for the inclusion-free control
};

Problem resolve(const RunConfig& cfg, bool need_window,
                bool from_targets = false) {
  Problem p;
  p.coeffs.gamma = cfg.gamma;
  const double window = cfg.targets ? cfg.targets->window : 0.0;
  if (need_window && !(window > 0.0))
    throw config_error("a spectral window L is required for this command");

  if (cfg.coefficients && !from_targets) {
    p.coeffs.a = cfg.coefficients->a;
    p.coeffs.b = cfg.coefficients->b;
    p.spec.window = window;
    if (p.coeffs.a.empty()) return p;
    p.limit = compute_sigma_rho(p.coeffs, cfg.geometry);
    p.spec.alpha = p.limit.sigma;
    p.spec.beta = p.limit.mu;
    if (need_window && !(window > p.limit.mu.back()))
      throw config_error("window L must exceed the last limit gap end mu_m");
    return p;
  }

  if (cfg.targets && cfg.targets->count() > 0) {
    p.spec = *cfg.targets;
    p.coeffs = design_coefficients(p.spec, cfg.geometry);
    p.coeffs.gamma = cfg.gamma;
    p.limit = compute_sigma_rho(p.coeffs, cfg.geometry);
    const double tol = std::max(1e4 * cfg.tol_root, 1e-10);
    for (std::size_t j = 0; j < p.spec.count(); ++j) {
      const double sigma_dev =
          std::abs(p.limit.sigma[j] - p.spec.alpha[j]) / p.spec.alpha[j];
      const double mu_dev =
          std::abs(p.limit.mu[j] - p.spec.beta[j]) / p.spec.beta[j];
      if (sigma_dev > tol || mu_dev > tol)
        throw solver_error(
            "designed medium misses target " + std::to_string(j + 1) +
            ": sigma = " + fmt_short(p.limit.sigma[j]) +
            ", mu = " + fmt_short(p.limit.mu[j]),
            {sigma_dev, mu_dev});
    }
    return p;
  }

  if (cfg.targets && cfg.geometry.count() == 0) {
    p.spec = *cfg.targets;  // inclusion-free control, window carried
    return p;
  }

  throw config_error("config needs target intervals or explicit coefficients");
}

std::vector<Interval> limit_bands(const Problem& p) {
  std::vector<Interval> bands;
  double lo = 0.0;
  for (std::size_t j = 0; j < p.limit.count(); ++j) {
    bands.push_back({lo, p.limit.sigma[j]});
    lo = p.limit.mu[j];
  }
  bands.push_back({lo, p.spec.window});
  return bands;
}

json medium_doc(const Problem& p) {
  json doc;
  doc["a"] = p.coeffs.a;
  doc["b"] = p.coeffs.b;
  doc["gamma"] = p.coeffs.gamma;
  doc["sigma"] = p.limit.sigma;
  doc["rho"] = p.limit.rho;
  doc["mu"] = p.limit.mu;
  doc["window"] = p.spec.window;
  doc["bands"] = intervals_json(limit_bands(p));
  return doc;
}

StudyOptions study_options(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  StudyOptions so;
  so.epsilons = cfg.epsilons;
  so.grid_n = cfg.grid_n;
  so.grid_n_max = cfg.grid_n_max;
  if (cfg.grid_policy == "direct") {
    so.force_mode = true;
    so.forced_mode = ShellMode::direct;
  } else if (cfg.grid_policy == "snap") {
    so.force_mode = true;
    so.forced_mode = ShellMode::snap;
  }
  so.samples_per_dim = cfg.theta_samples;
  so.bands = cfg.bands;
  so.threads = std::max(1, ctx.threads);
  so.solver.tolerance = cfg.tol_eigensolver;
  so.solver.seed = ctx.seed;
  so.merge_tolerance = cfg.tol_merge;
  return so;
}

const Interval* matched_gap(const std::vector<Interval>& gaps, double alpha,
                            double beta) {
  const Interval* best = nullptr;
  double best_overlap = 0.0;
  for (const auto& g : gaps) {
    double overlap = std::min(g.hi, beta) - std::max(g.lo, alpha);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = &g;
    }
  }
  return best;
}

json row_json(const ConvergenceRow& row) {
  json doc;
  doc["epsilon"] = row.epsilon;
  doc["grid_n"] = row.grid_n;
  doc["mode"] = mode_name(row.mode);
  doc["bands"] = row.bands;
  doc["merge_tolerance"] = row.report.merge_tolerance;
  doc["gaps"] = intervals_json(row.gaps);
  doc["covered"] = intervals_json(row.report.covered);
  return doc;
}

void write_band_csv(const fs::path& path, const ConvergenceRow& row) {
  const BandStructure& bs = row.structure;
  const int m_samples = bs.samples_per_dim;
  const auto cols = bs.sheets.cols();
  std::ostringstream out;
  out << "epsilon,sample";
  for (int d = 0; d < bs.dim; ++d) out << ",q" << d;
  for (int d = 0; d < bs.dim; ++d) out << ",theta" << d;
  for (Eigen::Index k = 1; k <= cols; ++k) out << ",lambda" << k;
  out << '\n';
  for (Eigen::Index t = 0; t < bs.sheets.rows(); ++t) {
    out << fmt(row.epsilon) << ',' << t;
    int rem = static_cast<int>(t);
    int q[3] = {0, 0, 0};
    for (int d = 0; d < bs.dim; ++d) {
      q[d] = rem % m_samples;
      rem /= m_samples;
    }
    for (int d = 0; d < bs.dim; ++d) out << ',' << q[d];
    for (int d = 0; d < bs.dim; ++d)
      out << ',' << fmt(2.0 * std::numbers::pi * q[d] / m_samples);
    for (Eigen::Index k = 0; k < cols; ++k) out << ',' << fmt(bs.sheets(t, k));
    out << '\n';
  }
  write_text(path, out.str());
}

std::string convergence_table(const GapSpec& spec,
                              const std::vector<ConvergenceRow>& rows) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  out << "epsilon,grid_n,mode,bands,merge_tolerance,target,alpha,beta,"
         "gap_lo,gap_hi,lo_error,hi_error\n";
  for (const auto& row : rows) {
    auto lead = [&] {
      out << fmt(row.epsilon) << ',' << row.grid_n << ','
          << mode_name(row.mode) << ',' << row.bands << ','
          << fmt(row.report.merge_tolerance) << ',';
    };
    if (spec.count() == 0) {
      lead();
      out << 0;
      for (int i = 0; i < 6; ++i) out << ',' << fmt(nan);
      out << '\n';
      continue;
    }
    for (std::size_t j = 0; j < spec.count(); ++j) {
      const Interval* g = matched_gap(row.gaps, spec.alpha[j], spec.beta[j]);
      lead();
      out << (j + 1) << ',' << fmt(spec.alpha[j]) << ',' << fmt(spec.beta[j])
          << ',' << fmt(g ? g->lo : nan) << ',' << fmt(g ? g->hi : nan) << ','
          << fmt(row.lo_error[j]) << ',' << fmt(row.hi_error[j]) << '\n';
    }
  }
  return out.str();
}

const ConvergenceRow& smallest_eps_row(const ConvergenceStudy& study) {
  return *std::min_element(
      study.rows.begin(), study.rows.end(),
      [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
}

}  // namespace

std::string cmd_design(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  if (!cfg.targets) throw config_error("design needs target intervals");
  Problem p = resolve(cfg, true, /*from_targets=*/true);
  if (ctx.dry_run)
    return "plan: design " + std::to_string(p.spec.count()) +
           " inclusion(s) for window [0, " + fmt_short(p.spec.window) +
           "]; would write design.json";
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "design.json", dumped(medium_doc(p)));
  return "designed " + std::to_string(p.spec.count()) +
         " inclusion(s): sigma " + list_short(p.limit.sigma) + ", mu " +
         list_short(p.limit.mu) + "; wrote design.json";
}

std::string cmd_limit(const RunContext& ctx) {
  Problem p = resolve(ctx.config, true);
  if (ctx.dry_run)
    return "plan: limit spectrum of " + std::to_string(p.limit.count()) +
           " inclusion(s) in [0, " + fmt_short(p.spec.window) +
           "]; would write limit.json";
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "limit.json", dumped(medium_doc(p)));
  return "limit spectrum: " + std::to_string(p.limit.count() + 1) +
         " band(s) in [0, " + fmt_short(p.spec.window) +
         "]; wrote limit.json";
}

std::string cmd_radial(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  Problem p = resolve(cfg, false);
  if (p.coeffs.a.empty())
    throw config_error("radial needs at least one inclusion");
  const int j0 = cfg.radial_inclusion - 1;
  if (j0 < 0 || j0 >= static_cast<int>(p.coeffs.a.size()))
    throw config_error("radial.inclusion is out of range");
  const double sigma_j = static_cast<double>(cfg.geometry.dim) *
                         p.coeffs.a[j0] /
                         (cfg.geometry.radius * p.coeffs.b[j0]);
  if (ctx.dry_run)
    return "plan: radial resonance of inclusion " +
           std::to_string(cfg.radial_inclusion) + " (sigma " +
           fmt_short(sigma_j) + ") at epsilons " + list_short(cfg.epsilons) +
           ", " + std::to_string(cfg.radial_n) +
           " cells; would write radial.csv";

  SolverOptions sopts;
  sopts.tolerance = cfg.tol_eigensolver;
  sopts.seed = ctx.seed;
  // The bottom eigenvalue sits near sigma_j while the rest of the spectrum
  // runs off to 1/eps^2 scales; shifting the preconditioner to sigma_j keeps
  // it focused on the resonance instead of the stiff bulk.
  sopts.shift = sigma_j;
  std::ostringstream out;
  out << "epsilon,lambda1,lambda1_minus_sigma,lambda2\n";
  for (double eps : cfg.epsilons) {
    auto med = PeriodicMedium::make(cfg.geometry, p.coeffs, eps);
    auto prof = radial_profile(med, j0);
    auto op = assemble_radial(prof, cfg.radial_n);
    SparseHermitian a = op.stiffness.cast<Complex>();
    auto eig = smallest_k(a, op.mass, 2, sopts);
    out << fmt(eps) << ',' << fmt(eig.values[0]) << ','
        << fmt(eig.values[0] - sigma_j) << ',' << fmt(eig.values[1]) << '\n';
  }
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "radial.csv", out.str());
  return "radial inclusion " + std::to_string(cfg.radial_inclusion) +
         ": lambda1 vs sigma = " + fmt_short(sigma_j) + " at " +
         std::to_string(cfg.epsilons.size()) +
         " epsilon(s); wrote radial.csv";
}

std::string cmd_bloch(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  Problem p = resolve(cfg, true);
  if (ctx.dry_run)
    return "plan: sweep M=" + std::to_string(cfg.theta_samples) + "^" +
           std::to_string(cfg.geometry.dim) + " theta samples at epsilons " +
           list_short(cfg.epsilons) + "; would write " +
           band_file_list(cfg.epsilons);
  auto study = convergence_study(p.spec, cfg.geometry, cfg.gamma,
                                 study_options(ctx));
  fs::create_directories(ctx.out_dir);
  for (const auto& row : study.rows)
    write_band_csv(ctx.out_dir / band_file(row.epsilon), row);
  return "swept " + std::to_string(study.rows.size()) +
         " epsilon(s) at M=" + std::to_string(cfg.theta_samples) +
         "; wrote " + band_file_list(cfg.epsilons);
}

std::string cmd_gaps(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  Problem p = resolve(cfg, true);
  if (ctx.dry_run)
    return "plan: extract gaps in [0, " + fmt_short(p.spec.window) +
           "] at epsilons " + list_short(cfg.epsilons) +
           "; would write gaps.json";
  auto study = convergence_study(p.spec, cfg.geometry, cfg.gamma,
                                 study_options(ctx));
  json doc;
  doc["window"] = p.spec.window;
  json rows = json::array();
  for (const auto& row : study.rows) rows.push_back(row_json(row));
  doc["rows"] = rows;
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "gaps.json", dumped(doc));
  const auto& last = smallest_eps_row(study);
  return "eps " + fmt_short(last.epsilon) + ": " +
         std::to_string(last.gaps.size()) + " gap(s) in [0, " +
         fmt_short(p.spec.window) + "]; wrote gaps.json";
}

std::string cmd_cell(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const int n = cfg.grid_n > 0 ? cfg.grid_n : 128;
  if (ctx.dry_run)
    return "plan: cell problem for " + std::to_string(cfg.geometry.count()) +
           " inclusion(s) at N=" + std::to_string(n) +
           "; would write ahat.json";
  Grid grid(cfg.geometry.dim, n);
  auto sol = solve_cell_problem(cfg.geometry, grid);
  auto a_hat = compute_a_hat(sol);

  json matrix = json::array();
  for (Eigen::Index r = 0; r < a_hat.rows(); ++r) {
    json rr = json::array();
    for (Eigen::Index c = 0; c < a_hat.cols(); ++c) rr.push_back(a_hat(r, c));
    matrix.push_back(rr);
  }
  json doc;
  doc["a_hat"] = matrix;
  doc["grid_n"] = n;
  doc["dim"] = cfg.geometry.dim;
  doc["bulk_fraction"] = sol.bulk_fraction;
  doc["geometry_hash"] = [&] {
    std::string bytes = std::to_string(cfg.geometry.dim) + "|" +
                        fmt(cfg.geometry.radius);
    for (const auto& c : cfg.geometry.centers)
      bytes += "|" + fmt(c[0]) + "," + fmt(c[1]) + "," + fmt(c[2]);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char ch : bytes) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
  }();
  doc["residuals"] = sol.residuals;
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "ahat.json", dumped(doc));
  std::string diag;
  for (Eigen::Index d = 0; d < a_hat.rows(); ++d) {
    if (!diag.empty()) diag += ", ";
    diag += fmt_short(a_hat(d, d));
  }
  return "effective matrix diag [" + diag + "] at N=" + std::to_string(n) +
         "; wrote ahat.json";
}

VerifyOutcome cmd_verify(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  Problem p = resolve(cfg, true);
  if (ctx.dry_run)
    return {"plan: verify " + std::to_string(p.spec.count()) +
                " target(s) in [0, " + fmt_short(p.spec.window) +
                "] at epsilons " + list_short(cfg.epsilons) +
                "; would write verify.json, convergence.csv, " +
                band_file_list(cfg.epsilons),
            true};
  auto study = convergence_study(p.spec, cfg.geometry, cfg.gamma,
                                 study_options(ctx));

  const ConvergenceRow& best = smallest_eps_row(study);
  const std::size_t m = p.spec.count();
  bool passed = best.gaps.size() == m;
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    worst = std::max({worst, best.lo_error[j], best.hi_error[j]});
    if (!(best.lo_error[j] <= cfg.endpoint_rel_error &&
          best.hi_error[j] <= cfg.endpoint_rel_error))
      passed = false;
  }

  json doc;
  doc["passed"] = passed;
  doc["endpoint_rel_error"] = cfg.endpoint_rel_error;
  doc["window"] = p.spec.window;
  doc["alpha"] = p.spec.alpha;
  doc["beta"] = p.spec.beta;
  doc["sigma"] = p.limit.sigma;
  doc["rho"] = p.limit.rho;
  doc["mu"] = p.limit.mu;
  json rows = json::array();
  for (const auto& row : study.rows) {
    json r = row_json(row);
    r["lo_error"] = row.lo_error;
    r["hi_error"] = row.hi_error;
    json matched = json::array();
    for (std::size_t j = 0; j < m; ++j) {
      const Interval* g = matched_gap(row.gaps, p.spec.alpha[j],
                                      p.spec.beta[j]);
      matched.push_back(g ? json::array({g->lo, g->hi}) : json());
    }
    r["matched"] = matched;
    rows.push_back(r);
  }
  doc["rows"] = rows;

  fs::create_directories(ctx.out_dir);
  for (const auto& row : study.rows)
    write_band_csv(ctx.out_dir / band_file(row.epsilon), row);
  write_text(ctx.out_dir / "convergence.csv",
             convergence_table(p.spec, study.rows));
  write_text(ctx.out_dir / "verify.json", dumped(doc));

  std::string summary =
      std::string(passed ? "PASS" : "FAIL") + " at eps " +
      fmt_short(best.epsilon) + ": " + std::to_string(best.gaps.size()) +
      " gap(s) against " + std::to_string(m) +
      " target(s), worst endpoint error " + fmt_short(worst) +
      " (threshold " + fmt_short(cfg.endpoint_rel_error) +
      "); wrote verify.json, convergence.csv, " +
      band_file_list(cfg.epsilons);
  return {summary, passed};
}

}  // namespace specgap
