// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/basis.hpp"

#include <cmath>

#include "porohdg/check.hpp"
#include "porohdg/quadrature.hpp"

namespace porohdg {

namespace {

// Scaled Legendre family Pt_i(zeta, s) = s^i P_i(zeta / s), polynomial in
// (zeta, s) jointly, with partial derivatives. Evaluated via the three-term
// recurrence (i+1) Pt_{i+1} = (2i+1) zeta Pt_i - i s^2 Pt_{i-1}. The chain
// rule inputs are zeta = 2x + y - 1 and s = 1 - y.
struct ScaledLegendre {
  std::vector<double> v, dx, dy;

  void compute(int n, double x, double y) {
    v.assign(n + 1, 0.0);
    dx.assign(n + 1, 0.0);
    dy.assign(n + 1, 0.0);
    const double zeta = 2.0 * x + y - 1.0;
    const double s = 1.0 - y;
    v[0] = 1.0;
    if (n == 0) return;
    v[1] = zeta;
    dx[1] = 2.0;
    dy[1] = 1.0;
    for (int i = 1; i < n; ++i) {
      const double c1 = (2.0 * i + 1.0) / (i + 1.0);
      const double c2 = static_cast<double>(i) / (i + 1.0);
      v[i + 1] = c1 * zeta * v[i] - c2 * s * s * v[i - 1];
      dx[i + 1] = c1 * (2.0 * v[i] + zeta * dx[i]) - c2 * s * s * dx[i - 1];
      dy[i + 1] = c1 * (v[i] + zeta * dy[i]) - c2 * (-2.0 * s * v[i - 1] + s * s * dy[i - 1]);
    }
  }
};

// Jacobi polynomials P_j^{(a, 0)}(t) with d/dt, standard normalization.
struct JacobiFamily {
  std::vector<double> v, d;

  void compute(int n, double a, double t) {
    v.assign(n + 1, 0.0);
    d.assign(n + 1, 0.0);
    v[0] = 1.0;
    if (n == 0) return;
    v[1] = 0.5 * ((a + 2.0) * t + a);
    d[1] = 0.5 * (a + 2.0);
    for (int j = 2; j <= n; ++j) {
      const double c0 = 2.0 * j * (j + a) * (2.0 * j + a - 2.0);
      const double c1 = (2.0 * j + a - 1.0) * (2.0 * j + a) * (2.0 * j + a - 2.0);
      const double c2 = (2.0 * j + a - 1.0) * a * a;
      const double c3 = 2.0 * (j + a - 1.0) * (j - 1.0) * (2.0 * j + a);
      v[j] = ((c1 * t + c2) * v[j - 1] - c3 * v[j - 2]) / c0;
      d[j] = (c1 * v[j - 1] + (c1 * t + c2) * d[j - 1] - c3 * d[j - 2]) / c0;
    }
  }
};

// Legendre P_n(u) with d/du on [-1, 1].
void legendre_all(int n, double u, std::vector<double>& v, std::vector<double>& d) {
  v.assign(n + 1, 0.0);
  d.assign(n + 1, 0.0);
  v[0] = 1.0;
  if (n >= 1) {
    v[1] = u;
    d[1] = 1.0;
  }
  for (int i = 1; i < n; ++i) {
    v[i + 1] = ((2.0 * i + 1.0) * u * v[i] - i * v[i - 1]) / (i + 1.0);
    d[i + 1] = ((2.0 * i + 1.0) * (v[i] + u * d[i]) - i * d[i - 1]) / (i + 1.0);
  }
}

}  // namespace

TriangleBasis::TriangleBasis(int degree) : degree_(degree) {
  POROHDG_REQUIRE(degree >= 0, "TriangleBasis: degree must be nonnegative");
  for (int d = 0; d <= degree; ++d)
    for (int i = 0; i <= d; ++i) index_.emplace_back(i, d - i);

  // Normalize each (analytically orthogonal) mode with an exact quadrature.
  const QuadratureRule rule = triangle_quadrature(2 * degree);
  scale_ = Eigen::VectorXd::Ones(size());
  Eigen::MatrixXd raw;
  tabulate(rule.points, &raw, nullptr, nullptr);
  for (int m = 0; m < size(); ++m) {
    const double nrm2 = (raw.col(m).array().square() * rule.weights.array()).sum();
    POROHDG_CHECK(nrm2 > 0.0, "TriangleBasis: degenerate mode norm");
    scale_(m) = 1.0 / std::sqrt(nrm2);
  }
}

void TriangleBasis::tabulate(const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts,
                             Eigen::MatrixXd* val, Eigen::MatrixXd* dx,
                             Eigen::MatrixXd* dy) const {
  const int np = static_cast<int>(pts.rows());
  const int nb = size();
  if (val) val->resize(np, nb);
  if (dx) dx->resize(np, nb);
  if (dy) dy->resize(np, nb);

  ScaledLegendre leg;
  JacobiFamily jac;
  for (int q = 0; q < np; ++q) {
    const double x = pts(q, 0);
    const double y = pts(q, 1);
    leg.compute(degree_, x, y);
    const double b = 2.0 * y - 1.0;
    for (int m = 0; m < nb; ++m) {
      const auto [i, j] = index_[m];
      jac.compute(j, 2.0 * i + 1.0, b);
      const double s = scale_(m);
      if (val) (*val)(q, m) = s * leg.v[i] * jac.v[j];
      if (dx) (*dx)(q, m) = s * leg.dx[i] * jac.v[j];
      if (dy) (*dy)(q, m) = s * (leg.dy[i] * jac.v[j] + leg.v[i] * jac.d[j] * 2.0);
    }
  }
}

Eigen::MatrixXd TriangleBasis::values(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts) const {
  Eigen::MatrixXd v;
  tabulate(pts, &v, nullptr, nullptr);
  return v;
}

EdgeBasis::EdgeBasis(int degree) : degree_(degree) {
  POROHDG_REQUIRE(degree >= 0, "EdgeBasis: degree must be nonnegative");
}

void EdgeBasis::tabulate(const Eigen::VectorXd& t, Eigen::MatrixXd* val,
                         Eigen::MatrixXd* dt) const {
  const int np = static_cast<int>(t.size());
  if (val) val->resize(np, size());
  if (dt) dt->resize(np, size());
  std::vector<double> v, d;
  for (int q = 0; q < np; ++q) {
    legendre_all(degree_, 2.0 * t(q) - 1.0, v, d);
    for (int n = 0; n <= degree_; ++n) {
      const double s = std::sqrt(2.0 * n + 1.0);
      if (val) (*val)(q, n) = s * v[n];
      if (dt) (*dt)(q, n) = 2.0 * s * d[n];
    }
  }
}

Eigen::MatrixXd EdgeBasis::values(const Eigen::VectorXd& t) const {
  Eigen::MatrixXd v;
  tabulate(t, &v, nullptr);
  return v;
}

AffineMap affine_map(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  AffineMap map;
  map.v0 = a;
  map.jacobian.col(0) = b - a;
  map.jacobian.col(1) = c - a;
  map.det = map.jacobian.determinant();
  POROHDG_CHECK(map.det > 0.0,
                "affine_map: nonpositive jacobian determinant " << map.det);
  map.inverse_jacobian = map.jacobian.inverse();
  return map;
}

}  // namespace porohdg
