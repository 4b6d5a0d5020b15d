#pragma once

#include <Eigen/Dense>

namespace localmax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Vector of squared euclidean row norms; accepts any dense expression.
template <typename Derived>
Vector squared_row_norms(const Eigen::MatrixBase<Derived>& m) {
  return m.rowwise().squaredNorm();
}

}  // namespace localmax
