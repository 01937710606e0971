#pragma once

#include <Eigen/Dense>

#include "ssde/rng.hpp"

namespace ssde {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng,
                              double stddev = 1.0) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = stddev * rng.gaussian();
    }
  }
  return out;
}

}  // namespace ssde
