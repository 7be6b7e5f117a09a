#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specgap/design.hpp"
#include "specgap/geometry.hpp"

namespace specgap {

// Run description loaded from a JSON config file. Key names are fixed;
// unknown keys anywhere in the file are rejected. Numbers shown are the
// defaults when the key is absent.
//
//   intervals    [[alpha_1, beta_1], ...]        required for design paths
//   L            spectral window                 required for design paths
//   geometry     { n, r, centers: [[..], ...] }  required
//   gamma        shell exponent > 3              default 3.5
//   epsilons     [0.4, 0.3, 0.2]
//   grid         { N: int|"auto", N_max: 256, policy: "auto"|"direct"|"snap" }
//   M            theta samples per axis, 8
//   K            band count, int or "auto"
//   coefficients { a: [...], b: [...] }          optional explicit medium
//   radial       { inclusion: 1, N: 2048 }
//   tolerances   { root: 1e-12, eigensolver: 1e-8, merge: num|"auto" }
//   thresholds   { endpoint_rel_error: 0.2 }     verify exit criteria
//   output_dir   "out"
struct RunConfig {
  std::optional<GapSpec> targets;
  UnitCellGeometry geometry;
  double gamma = 3.5;
  std::vector<double> epsilons{0.4, 0.3, 0.2};

  int grid_n = 0;  // 0 = auto
  int grid_n_max = 256;
  std::string grid_policy = "auto";  // "auto" | "direct" | "snap"

  int theta_samples = 8;  // M
  int bands = 0;          // K, 0 = auto

  std::optional<MediumCoefficients> coefficients;  // explicit medium

  int radial_inclusion = 1;  // 1-based
  int radial_n = 2048;

  double tol_root = 1e-12;
  double tol_eigensolver = 1e-8;
  double tol_merge = 0.0;  // 0 = auto

  double endpoint_rel_error = 0.2;

  std::string output_dir = "out";
};

RunConfig load_config(const std::filesystem::path& file);
RunConfig parse_config(const std::string& text);

}  // namespace specgap
