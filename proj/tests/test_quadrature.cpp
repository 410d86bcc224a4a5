// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/quadrature.hpp"

#include <cmath>

#include "doctest.h"

using namespace porohdg;

namespace {

// exact monomial integrals: int_T x^a y^b = a! b! / (a + b + 2)! on the
// reference triangle, int_0^1 t^a = 1 / (a + 1) on the reference edge
double tri_monomial_exact(int a, int b) {
  double num = 1.0;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  double den = 1.0;
  for (int i = 2; i <= a + b + 2; ++i) den *= i;
  return num / den;
}

double quad_tri_monomial(const QuadratureRule& rule, int a, int b) {
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    s += rule.weights(q) * std::pow(rule.points(q, 0), a) * std::pow(rule.points(q, 1), b);
  return s;
}

}  // namespace

TEST_CASE("triangle quadrature integrates constants and low monomials") {
  CHECK(quad_tri_monomial(triangle_quadrature(0), 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  // int x^2 = 2! / 4! = 1/12
  CHECK(quad_tri_monomial(triangle_quadrature(2), 2, 0) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(tri_monomial_exact(2, 0) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("triangle quadrature is exact up to the requested degree") {
  for (int deg : {1, 2, 3, 4, 5, 8, 10, 12}) {
    const QuadratureRule rule = triangle_quadrature(deg);
    CHECK(rule.exactness >= deg);
    CHECK(rule.weights.minCoeff() > 0.0);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        const double exact = tri_monomial_exact(a, b);
        CHECK(quad_tri_monomial(rule, a, b) == doctest::Approx(exact).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("degree 2k+2 rule handles the k = 3 integrand products") {
  const QuadratureRule rule = triangle_quadrature(8);
  for (int a = 0; a <= 8; ++a) {
    const double exact = tri_monomial_exact(a, 8 - a);
    CHECK(quad_tri_monomial(rule, a, 8 - a) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("edge quadrature") {
  const QuadratureRule r1 = edge_quadrature(1);
  double s = 0.0;
  for (int q = 0; q < r1.size(); ++q) s += r1.weights(q) * r1.points(q, 0);
  CHECK(s == doctest::Approx(0.5).epsilon(1e-14));

  const QuadratureRule r5 = edge_quadrature(5);
  double s5 = 0.0;
  for (int q = 0; q < r5.size(); ++q) s5 += r5.weights(q) * std::pow(r5.points(q, 0), 5);
  CHECK(s5 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  // an m-point Gauss rule is exact to degree 2m - 1
  for (int m = 1; m <= 8; ++m) {
    const QuadratureRule rule = edge_quadrature(2 * m - 1);
    CHECK(rule.size() == m);
    for (int a = 0; a <= 2 * m - 1; ++a) {
      double acc = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        acc += rule.weights(q) * std::pow(rule.points(q, 0), a);
      CHECK(acc == doctest::Approx(1.0 / (a + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("quadrature rejects bad degrees") {
  CHECK_THROWS_AS(triangle_quadrature(-1), std::invalid_argument);
  CHECK_THROWS_AS(triangle_quadrature(101), std::invalid_argument);
  CHECK_THROWS_AS(edge_quadrature(-2), std::invalid_argument);
}
