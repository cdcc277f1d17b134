#pragma once

// Matrix exponential by scaling and squaring with a fixed [13/13] Pade
// approximant (Higham's theta_13 threshold).

#include <Eigen/Dense>

namespace bck {

/// exp(A) for a small dense square matrix.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

template <int N>
Eigen::Matrix<double, N, N> expm(const Eigen::Matrix<double, N, N>& a) {
  return Eigen::Matrix<double, N, N>(expm(Eigen::MatrixXd(a)));
}

}  // namespace bck
