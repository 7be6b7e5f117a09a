#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace specgap {

// Invalid problem description: non-interlaced intervals, non-positive data,
// wrong array sizes. The message names the offending field.
class spec_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Inclusions overlap each other or the cell boundary, or a radius is
// inconsistent with the cell.
class geometry_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation requested at (or numerically on top of) a pole of the secular
// function.
class pole_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Two resonance values coincide; the root structure between them is not
// defined and the caller has to fix the input rather than rely on a
// perturbation chosen here.
class degenerate_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Spectral window does not contain the structure it is supposed to bound.
class window_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Configuration file problems: syntax, unknown keys, missing keys.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of its iteration budget. Carries the best
// residuals seen so the caller can tell "almost there" from "diverged".
class solver_error : public std::runtime_error {
public:
  solver_error(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), best_residuals(std::move(residuals)) {}
  std::vector<double> best_residuals;
};

}  // namespace specgap
