#pragma once

#include <array>
#include <cstddef>

#include "specgap/errors.hpp"

namespace specgap {

// Uniform cell-centered grid on [0,1]^dim: N cells per axis, node i at
// (i + 1/2) h with h = 1/N. Linear index is row-major with axis 0 fastest.
struct Grid {
  int dim = 2;
  int n = 0;       // cells per axis
  double h = 0.0;  // 1/n

  Grid() = default;
  Grid(int dim_, int n_) : dim(dim_), n(n_), h(1.0 / n_) {
    if (dim_ < 1 || dim_ > 3) throw spec_error("grid dim must be 1, 2 or 3");
    if (n_ < 2) throw spec_error("grid needs at least 2 cells per axis");
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
    return s;
  }

  std::array<int, 3> unpack(std::size_t idx) const {
    std::array<int, 3> m{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      m[d] = static_cast<int>(idx % static_cast<std::size_t>(n));
      idx /= static_cast<std::size_t>(n);
    }
    return m;
  }

  std::size_t pack(const std::array<int, 3>& m) const {
    std::size_t idx = 0;
    for (int d = dim - 1; d >= 0; --d)
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(m[d]);
    return idx;
  }

  std::array<double, 3> node(std::size_t idx) const {
    auto m = unpack(idx);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) y[d] = (m[d] + 0.5) * h;
    return y;
  }
};

}  // namespace specgap
