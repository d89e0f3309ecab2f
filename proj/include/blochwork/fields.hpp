#pragma once

// A sampled scalar field over a rectangular grid in any two-coordinate
// chart (control plane or manifold chart). axis1 is the slow (row) axis,
// axis2 the fast (column) axis; values are row-major.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "blochwork/errors.hpp"

namespace blochwork {

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct ScalarField2D {
  GridAxis axis1;  ///< slow axis (rows)
  GridAxis axis2;  ///< fast axis (columns)
  std::vector<double> values;      ///< axis1.size() * axis2.size(), row-major
  std::vector<std::uint8_t> mask;  ///< nonzero marks an excluded node

  std::size_t rows() const { return axis1.values.size(); }
  std::size_t cols() const { return axis2.values.size(); }

  double& at(std::size_t i1, std::size_t i2) {
    return values[i1 * cols() + i2];
  }
  double at(std::size_t i1, std::size_t i2) const {
    return values[i1 * cols() + i2];
  }
  bool masked(std::size_t i1, std::size_t i2) const {
    return mask[i1 * cols() + i2] != 0;
  }

  void check_consistent() const {
    const std::size_t n = rows() * cols();
    if (values.size() != n || mask.size() != n)
      throw ValidationError("ScalarField2D: values/mask size must equal " +
                            std::to_string(n));
  }

  static ScalarField2D zeros(GridAxis a1, GridAxis a2) {
    ScalarField2D f;
    f.axis1 = std::move(a1);
    f.axis2 = std::move(a2);
    f.values.assign(f.rows() * f.cols(), 0.0);
    f.mask.assign(f.rows() * f.cols(), 0);
    return f;
  }
};

}  // namespace blochwork
