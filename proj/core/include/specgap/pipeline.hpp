#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "specgap/config.hpp"

namespace specgap {

// Execution knobs shared by every subcommand. All artifact contents are
// functions of (config, seed) alone, so reruns are byte-identical.
struct RunContext {
  RunConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  bool dry_run = false;
};

// Each command writes its artifacts under out_dir and returns a short,
// human-readable summary for the terminal. On dry_run the plan is returned
// and nothing is written.
//
//   design -> design.json     coefficients, resonances, limit bands
//   limit  -> limit.json      sigma/rho/mu and limit bands of a given medium
//   radial -> radial.csv      one-inclusion eigenvalues over epsilons
//   bloch  -> bands_eps*.csv  eigenvalue sheets for one epsilon each
//   gaps   -> gaps.json       gap report per epsilon
//   cell   -> ahat.json       effective matrix
//   verify -> convergence.csv + verify.json, exit criteria applied
std::string cmd_design(const RunContext& ctx);
std::string cmd_limit(const RunContext& ctx);
std::string cmd_radial(const RunContext& ctx);
std::string cmd_bloch(const RunContext& ctx);
std::string cmd_gaps(const RunContext& ctx);
std::string cmd_cell(const RunContext& ctx);

// Returns the summary plus a pass flag: false when a verify threshold from
// the config is violated.
struct VerifyOutcome {
  std::string summary;
  bool passed = true;
};
VerifyOutcome cmd_verify(const RunContext& ctx);

}  // namespace specgap
