// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/quadrature.hpp"

#include <cmath>

#include "porohdg/check.hpp"

namespace porohdg {

namespace {

constexpr int max_exactness = 100;

// Gauss rule from the symmetric tridiagonal Jacobi matrix of the three-term
// recurrence (Golub-Welsch). `diag` holds the recurrence alphas, `offdiag`
// the square roots of the betas, and `mu0` the total mass of the weight.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                  double mu0, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  const int m = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    J(i, i) = diag(i);
    if (i + 1 < m) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  POROHDG_CHECK(es.info() == Eigen::Success, "Golub-Welsch eigensolve failed");
  x = es.eigenvalues();
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    w(i) = mu0 * v0 * v0;
  }
}

}  // namespace

namespace detail {

void gauss_legendre(int m, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  POROHDG_REQUIRE(m >= 1, "gauss_legendre: need at least one point");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd offdiag(std::max(m - 1, 0));
  for (int i = 1; i < m; ++i)
    offdiag(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  golub_welsch(diag, offdiag, 2.0, x, w);
}

void gauss_jacobi(int m, double a, double b, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  POROHDG_REQUIRE(m >= 1, "gauss_jacobi: need at least one point");
  POROHDG_REQUIRE(a > -1.0 && b > -1.0, "gauss_jacobi: weight exponents must exceed -1");
  Eigen::VectorXd diag(m), offdiag(std::max(m - 1, 0));
  const double ab = a + b;
  diag(0) = (b - a) / (ab + 2.0);
  for (int n = 1; n < m; ++n) {
    const double den = (2.0 * n + ab) * (2.0 * n + ab + 2.0);
    diag(n) = (b * b - a * a) / den;
  }
  for (int n = 1; n < m; ++n) {
    double beta;
    if (n == 1) {
      beta = 4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      const double s = 2.0 * n + ab;
      beta = 4.0 * n * (n + a) * (n + b) * (n + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    offdiag(n - 1) = std::sqrt(beta);
  }
  // mu0 = int_{-1}^{1} (1 - t)^a (1 + t)^b dt = 2^{a+b+1} B(a+1, b+1)
  const double mu0 = std::pow(2.0, ab + 1.0) *
                     std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  golub_welsch(diag, offdiag, mu0, x, w);
}

}  // namespace detail

QuadratureRule edge_quadrature(int exactness) {
  POROHDG_REQUIRE(exactness >= 0, "edge_quadrature: exactness must be nonnegative");
  POROHDG_REQUIRE(exactness <= max_exactness,
                  "edge_quadrature: exactness " << exactness << " above supported limit "
                                                << max_exactness);
  const int m = exactness / 2 + 1;  // 2m - 1 >= exactness
  Eigen::VectorXd x, w;
  detail::gauss_legendre(m, x, w);
  QuadratureRule rule;
  rule.points.resize(m, 2);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.points(i, 0) = 0.5 * (x(i) + 1.0);
    rule.points(i, 1) = 0.0;
    rule.weights(i) = 0.5 * w(i);
  }
  rule.exactness = 2 * m - 1;
  return rule;
}

QuadratureRule triangle_quadrature(int exactness) {
  POROHDG_REQUIRE(exactness >= 0, "triangle_quadrature: exactness must be nonnegative");
  POROHDG_REQUIRE(exactness <= max_exactness,
                  "triangle_quadrature: exactness " << exactness << " above supported limit "
                                                    << max_exactness);
  QuadratureRule rule;
  if (exactness <= 1) {
    // centroid rule
    rule.points.resize(1, 2);
    rule.points << 1.0 / 3.0, 1.0 / 3.0;
    rule.weights.resize(1);
    rule.weights << 0.5;
    rule.exactness = 1;
    return rule;
  }
  if (exactness == 2) {
    // three-point symmetric rule at the edge midpoint images
    rule.points.resize(3, 2);
    rule.points << 1.0 / 6.0, 1.0 / 6.0,
                   2.0 / 3.0, 1.0 / 6.0,
                   1.0 / 6.0, 2.0 / 3.0;
    rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
    rule.exactness = 2;
    return rule;
  }

  // Collapsed product rule: x = xi (1 - eta), y = eta with xi from
  // Gauss-Legendre on [0, 1] and eta from Gauss-Jacobi with weight (1 - eta).
  const int m = exactness / 2 + 1;
  Eigen::VectorXd xg, wg, xj, wj;
  detail::gauss_legendre(m, xg, wg);
  detail::gauss_jacobi(m, 1.0, 0.0, xj, wj);
  rule.points.resize(m * m, 2);
  rule.weights.resize(m * m);
  int idx = 0;
  for (int j = 0; j < m; ++j) {
    const double eta = 0.5 * (xj(j) + 1.0);
    const double weta = 0.25 * wj(j);  // includes the (1 - eta) Jacobian factor
    for (int i = 0; i < m; ++i) {
      const double xi = 0.5 * (xg(i) + 1.0);
      rule.points(idx, 0) = xi * (1.0 - eta);
      rule.points(idx, 1) = eta;
      rule.weights(idx) = 0.5 * wg(i) * weta;
      ++idx;
    }
  }
  rule.exactness = 2 * m - 1;
  return rule;
}

}  // namespace porohdg
