// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace porohdg {

/// A positive-weight quadrature rule in reference coordinates.
struct QuadratureRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule on the reference triangle {(x, y) : x, y >= 0, x + y <= 1}, exact for
/// all polynomials of total degree <= exactness. Low degrees come from a small
/// table of symmetric rules; higher degrees fall back to a collapsed
/// Gauss-Legendre x Gauss-Jacobi product rule. All weights are positive.
QuadratureRule triangle_quadrature(int exactness);

/// Gauss-Legendre rule on [0, 1] (second point coordinate unused, set to 0),
/// exact for polynomials of degree <= exactness. An m-point rule is exact to
/// degree 2m - 1.
QuadratureRule edge_quadrature(int exactness);

namespace detail {
// Nodes and weights of an m-point Gauss rule on [-1, 1] for the Legendre
// weight (w == 1) or the Jacobi weight (1 - t)^a (1 + t)^b, via the
// Golub-Welsch eigenvalue method.
void gauss_legendre(int m, Eigen::VectorXd& x, Eigen::VectorXd& w);
void gauss_jacobi(int m, double a, double b, Eigen::VectorXd& x, Eigen::VectorXd& w);
}  // namespace detail

}  // namespace porohdg
