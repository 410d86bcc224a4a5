// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace porohdg {

/// Orthonormal modal basis of P_k on the reference triangle
/// {(x, y) : x, y >= 0, x + y <= 1} (Jacobi-type construction on collapsed
/// coordinates). Mass matrix is the identity to rounding.
class TriangleBasis {
 public:
  explicit TriangleBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(index_.size()); }

  /// Values at reference points; result is (n_points x size()).
  Eigen::MatrixXd values(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const;

  /// Values and reference gradients; any output pointer may be null.
  void tabulate(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts,
                Eigen::MatrixXd* val, Eigen::MatrixXd* dx, Eigen::MatrixXd* dy) const;

 private:
  int degree_;
  std::vector<std::pair<int, int>> index_;  // (i, j) with i + j <= degree
  Eigen::VectorXd scale_;
};

/// Orthonormal (shifted, scaled Legendre) basis of P_k on [0, 1].
class EdgeBasis {
 public:
  explicit EdgeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  /// Values at parameters t in [0, 1]; result is (n_points x size()).
  Eigen::MatrixXd values(const Eigen::VectorXd& t) const;

  /// Values and first derivatives d/dt.
  void tabulate(const Eigen::VectorXd& t, Eigen::MatrixXd* val, Eigen::MatrixXd* dt) const;

 private:
  int degree_;
};

/// Affine map x = v0 + J x_ref from the reference triangle to a physical cell.
struct AffineMap {
  Eigen::Vector2d v0;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_jacobian;
  double det = 0.0;

  Eigen::Vector2d to_physical(const Eigen::Vector2d& ref) const {
    return v0 + jacobian * ref;
  }
  Eigen::Vector2d to_reference(const Eigen::Vector2d& phys) const {
    return inverse_jacobian * (phys - v0);
  }
};

/// Map for the triangle (a, b, c); throws when the determinant is not
/// strictly positive. |det| equals twice the cell area, and physical gradients
/// are inverse_jacobian^T times reference gradients.
AffineMap affine_map(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c);

}  // namespace porohdg
