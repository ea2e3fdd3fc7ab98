#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stgf/core/types.hpp"

namespace stgf {

inline constexpr double kSpdTol = 1e-9;
inline constexpr double kDetFloor = 1e-30;

/// Raised when a matrix that must be a covariance fails the SPD check.
/// Signals a corrupted covariance upstream rather than a recoverable state.
struct NotSpdError : std::runtime_error {
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

template <typename Derived>
Mat3T<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return ((m + m.transpose()) / 2).eval();
}

/// True iff m is symmetric within tol and its smallest eigenvalue is > -tol.
template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& m, double tol = kSpdTol) {
  static_assert(Derived::RowsAtCompileTime == 3 && Derived::ColsAtCompileTime == 3);
  using Scalar = typename Derived::Scalar;
  const Mat3T<Scalar> a = m.derived();
  if (!a.allFinite()) return false;
  if ((a - a.transpose()).template lpNorm<Eigen::Infinity>() >= tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat3T<Scalar>> eig(symmetrized(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > -tol;
}

/// Inverse of a symmetric positive definite 3x3 matrix via the adjugate,
/// computed from the six unique cofactors so the result is exactly symmetric.
template <typename Derived>
Mat3T<typename Derived::Scalar> invert_spd(const Eigen::MatrixBase<Derived>& m) {
  static_assert(Derived::RowsAtCompileTime == 3 && Derived::ColsAtCompileTime == 3);
  using Scalar = typename Derived::Scalar;
  const Mat3T<Scalar> s = m.derived();
  if (!is_spd(s)) throw NotSpdError("invert_spd: matrix is not symmetric positive definite");
  const Scalar a = s(0, 0), b = s(0, 1), c = s(0, 2);
  const Scalar d = s(1, 1), e = s(1, 2), f = s(2, 2);
  const Scalar c00 = d * f - e * e;
  const Scalar c01 = c * e - b * f;
  const Scalar c02 = b * e - c * d;
  const Scalar det = a * c00 + b * c01 + c * c02;
  if (!(det > kDetFloor)) throw NotSpdError("invert_spd: determinant below floor");
  Mat3T<Scalar> inv;
  inv(0, 0) = c00;
  inv(0, 1) = inv(1, 0) = c01;
  inv(0, 2) = inv(2, 0) = c02;
  inv(1, 1) = a * f - c * c;
  inv(1, 2) = inv(2, 1) = c * b - a * e;
  inv(2, 2) = a * d - b * b;
  inv /= det;
  return inv;
}

/// All n(n-1)/2 unordered index pairs (i, j) with i < j.
inline std::vector<std::pair<int, int>> complete_edges(int n_nodes) {
  std::vector<std::pair<int, int>> edges;
  if (n_nodes < 2) return edges;
  edges.reserve(static_cast<std::size_t>(n_nodes) * (n_nodes - 1) / 2);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = i + 1; j < n_nodes; ++j) edges.emplace_back(i, j);
  }
  return edges;
}

}  // namespace stgf
