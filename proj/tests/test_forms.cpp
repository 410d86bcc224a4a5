// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/forms.hpp"

#include <cmath>

#include "doctest.h"
#include "porohdg/timeloop.hpp"

using namespace porohdg;

namespace {

// unit reference triangle as a one-cell mesh (no boundary constraints)
Mesh reference_cell_mesh() {
  Mesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  mesh.cells = {{0, 1, 2}};
  mesh.finalize();
  return mesh;
}

Mesh untagged_square(int n) {
  return build_structured_square(n);
}

Mesh all_dirichlet_square(int n) {
  return tag_boundary(
      build_structured_square(n),
      {{[](const Eigen::Vector2d&) { return true; }, DispTag::dirichlet}},
      {{[](const Eigen::Vector2d&) { return true; }, FlowTag::pressure}});
}

ModelParams params_mu_half(int k) {
  ModelParams p;
  p.E = 1.3;
  p.nu = 0.3;  // mu = E / (2 (1 + nu)) = 0.5
  p.k = k;
  return p;
}

// coefficients of an exact polynomial field and its matching trace
void interpolate_pair(const Mesh& mesh, const DofLayout& layout,
                      const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn,
                      Eigen::VectorXd& u, Eigen::VectorXd& ubar) {
  u = l2_project_vector(mesh, layout, fn);
  ubar = Eigen::VectorXd::Zero(layout.u_trace_size());
  project_u_trace(mesh, layout, fn, [](int) { return true; }, ubar);
}

}  // namespace

TEST_CASE("a_h vanishes on rigid motions with matching traces") {
  const Mesh mesh = reference_cell_mesh();
  for (int k : {1, 2}) {
    const DofLayout layout = build_layout(mesh, k, Variant::hdg);
    const ModelParams params = params_mu_half(k);
    const ReferenceTables tab(layout);
    Eigen::VectorXd u, ubar;

    interpolate_pair(mesh, layout,
                     [](const Eigen::Vector2d&) { return Eigen::Vector2d(0.7, -0.3); }, u,
                     ubar);
    CHECK(std::abs(ah_energy(mesh, layout, params, tab, u, ubar)) < 1e-12);

    interpolate_pair(mesh, layout,
                     [](const Eigen::Vector2d& x) { return Eigen::Vector2d(-x(1), x(0)); },
                     u, ubar);
    CHECK(std::abs(ah_energy(mesh, layout, params, tab, u, ubar)) < 1e-12);
  }
}

TEST_CASE("a_h of u = (x1, 0) with matching trace equals 2 mu |eps|^2 area") {
  const Mesh mesh = reference_cell_mesh();
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  const ModelParams params = params_mu_half(1);
  const ReferenceTables tab(layout);
  Eigen::VectorXd u, ubar;
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(0), 0.0); }, u,
                   ubar);
  // hand quadrature: eps = diag(1, 0), 2 mu eps : eps = 1, area = 1/2
  CHECK(ah_energy(mesh, layout, params, tab, u, ubar) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("penalty and consistency terms vanish for continuous polynomial pairs") {
  const Mesh mesh = untagged_square(2);
  const DofLayout layout = build_layout(mesh, 2, Variant::hdg);
  ModelParams params = params_mu_half(2);
  const ReferenceTables tab(layout);
  Eigen::VectorXd u, ubar;
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) {
                     return Eigen::Vector2d(x(0) * x(0), x(0) * x(1));
                   },
                   u, ubar);
  // independent quadrature of 2 mu ||eps||^2 for eps = [[2x, y/2], [y/2, x]]
  const QuadratureRule rule = triangle_quadrature(6);
  double exact = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& kc = mesh.cells[c];
    const AffineMap map =
        affine_map(mesh.vertices[kc[0]], mesh.vertices[kc[1]], mesh.vertices[kc[2]]);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = map.to_physical(rule.points.row(q).transpose());
      const double e11 = 2 * x(0), e22 = x(0), e12 = 0.5 * x(1);
      exact += rule.weights(q) * map.det * 2.0 * params.mu() *
               (e11 * e11 + e22 * e22 + 2 * e12 * e12);
    }
  }
  CHECK(ah_energy(mesh, layout, params, tab, u, ubar) ==
        doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("b_h oracle values on the reference cell") {
  const Mesh mesh = reference_cell_mesh();
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  const ReferenceTables tab(layout);
  const ElementContext ctx = build_element_context(mesh, tab, 0);
  const CellTraceU tru = build_cell_trace_u(mesh, layout, 0);
  const LocalBh B = assemble_bh_local(ctx, tru);

  // constant v with matching trace: b_h(v, q) = 0 for all q
  Eigen::VectorXd u, ubar;
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d&) { return Eigen::Vector2d(0.4, -1.1); }, u,
                   ubar);
  Eigen::VectorXd te(tru.size());
  for (int s = 0; s < tru.size(); ++s) te(s) = ubar(tru.dofs[s]);
  for (int r = 0; r < layout.nkm1; ++r) {
    CHECK(std::abs((B.q_v * u.head(2 * layout.nk))(r)) < 1e-13);
  }
  const Eigen::VectorXd facet_rows = B.qbar_v * u.head(2 * layout.nk) + B.qbar_vbar * te;
  CHECK(facet_rows.cwiseAbs().maxCoeff() < 1e-13);

  // v = (x1, x2), vbar = trace, q = 1, qbar = 1: b_h = -(1, div v) = -1
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(0), x(1)); }, u,
                   ubar);
  for (int s = 0; s < tru.size(); ++s) te(s) = ubar(tru.dofs[s]);
  // expand the constant test pair (q = 1, qbar = 1) in the modal bases
  Eigen::VectorXd q_coeff = l2_project_scalar(mesh, layout, [](const Eigen::Vector2d&) {
    return 1.0;
  });
  Eigen::VectorXd qbar_coeff;
  project_facet_scalar(mesh, layout, [](const Eigen::Vector2d&) { return 1.0; },
                       [](int) { return true; }, qbar_coeff);
  double val = q_coeff.dot(B.q_v * u.head(2 * layout.nk));
  for (int e = 0; e < 3; ++e) {
    for (int m = 0; m <= layout.k; ++m) {
      const int row = e * (layout.k + 1) + m;
      const double qb = qbar_coeff(layout.facet_scalar_dof(mesh.cell_facets[0][e], m));
      val += qb * ((B.qbar_v * u.head(2 * layout.nk))(row) + (B.qbar_vbar * te)(row));
    }
  }
  CHECK(val == doctest::Approx(-1.0).epsilon(1e-12));

  // velocity role: w constant, qbar = 1 on all edges: <1, w . n>_dK = 0
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d&) { return Eigen::Vector2d(2.0, 5.0); }, u,
                   ubar);
  double closed = 0.0;
  for (int e = 0; e < 3; ++e) {
    for (int m = 0; m <= layout.k; ++m) {
      const int row = e * (layout.k + 1) + m;
      const double qb = qbar_coeff(layout.facet_scalar_dof(mesh.cell_facets[0][e], m));
      closed += qb * (B.qbar_v * u.head(2 * layout.nk))(row);
    }
  }
  CHECK(std::abs(closed) < 1e-13);
}

TEST_CASE("norm_v oracle on the reference cell") {
  const Mesh mesh = reference_cell_mesh();
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  const ReferenceTables tab(layout);

  const Eigen::VectorXd zu = Eigen::VectorXd::Zero(layout.u_size());
  const Eigen::VectorXd zt = Eigen::VectorXd::Zero(layout.u_trace_size());
  CHECK(norm_v(mesh, layout, tab, zu, zt) == 0.0);

  Eigen::VectorXd u, ubar;
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) {
                     return Eigen::Vector2d(0.3 - x(1), x(0) + 0.8);
                   },
                   u, ubar);
  CHECK(norm_v(mesh, layout, tab, u, ubar) < 1e-12);

  // v = (x1, 0), vbar = 0: independent fine-quadrature oracle
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x(0), 0.0); }, u,
                   ubar);
  const double val = norm_v(mesh, layout, tab, u, zt);
  double eps2 = 0.5;  // ||eps||^2 = int 1 over the cell
  const double h = std::sqrt(2.0);
  // int_dK x1^2 over the three edges: bottom 1/3, hypotenuse sqrt(2)/3, left 0
  const double bdry = 1.0 / 3.0 + std::sqrt(2.0) / 3.0;
  CHECK(val * val == doctest::Approx(eps2 + bdry / h).epsilon(1e-12));
}

TEST_CASE("norm_q oracle values") {
  {
    const Mesh mesh = untagged_square(2);
    const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
    const ReferenceTables tab(layout);
    const Eigen::VectorXd q =
        l2_project_scalar(mesh, layout, [](const Eigen::Vector2d&) { return 1.0; });
    const Eigen::VectorXd qbar = Eigen::VectorXd::Zero(layout.facet_scalar_size());
    CHECK(norm_q(mesh, layout, tab, q, qbar) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm_q(mesh, layout, tab, Eigen::VectorXd::Zero(layout.p_size()), qbar) == 0.0);
  }
  {
    const Mesh mesh = reference_cell_mesh();
    const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
    const ReferenceTables tab(layout);
    Eigen::VectorXd qbar;
    project_facet_scalar(mesh, layout, [](const Eigen::Vector2d&) { return 1.0; },
                         [](int) { return true; }, qbar);
    const double val =
        norm_q(mesh, layout, tab, Eigen::VectorXd::Zero(layout.p_size()), qbar);
    const double h = std::sqrt(2.0);
    const double perimeter = 2.0 + std::sqrt(2.0);
    CHECK(val * val == doctest::Approx(h * perimeter).epsilon(1e-12));
  }
}

TEST_CASE("assembled a_h matrix is symmetric") {
  const Mesh mesh = all_dirichlet_square(2);
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const DofLayout layout = build_layout(mesh, 2, variant);
    ModelParams p = params_mu_half(2);
    const Eigen::MatrixXd A = dense_ah(mesh, layout, p);
    const double scale = A.cwiseAbs().maxCoeff();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("norm Gram matrices are positive definite after constraints") {
  const Mesh mesh = all_dirichlet_square(2);
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const DofLayout layout = build_layout(mesh, 1, variant);
    const Eigen::MatrixXd Gv = dense_gram_v(mesh, layout);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gv);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Eigen::MatrixXd Gq = dense_gram_q(mesh, layout, false);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(Gq);
    CHECK(esq.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("coercivity certified at the default penalty, lost at beta = 0.01") {
  {
    const Mesh mesh = all_dirichlet_square(2);
    const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
    ModelParams p = params_mu_half(1);
    const CoercivityReport rep = coercivity_check(mesh, layout, p);
    CHECK(rep.coercive);
    CHECK(rep.ratio > 0.0);
  }
  {
    const Mesh mesh = all_dirichlet_square(2);
    const DofLayout layout = build_layout(mesh, 3, Variant::hdg);
    ModelParams p = params_mu_half(3);
    p.beta = 0.01;  // far below any workable interior-penalty threshold
    const CoercivityReport rep = coercivity_check(mesh, layout, p);
    CHECK_FALSE(rep.coercive);
  }
}

TEST_CASE("rigid pair on an unconstrained mesh sits in the kernel of both forms") {
  const Mesh mesh = untagged_square(1);
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  const ModelParams params = params_mu_half(1);
  const ReferenceTables tab(layout);
  Eigen::VectorXd u, ubar;
  interpolate_pair(mesh, layout,
                   [](const Eigen::Vector2d& x) {
                     return Eigen::Vector2d(1.0 - 0.5 * x(1), 0.5 * x(0) + 2.0);
                   },
                   u, ubar);
  CHECK(std::abs(ah_energy(mesh, layout, params, tab, u, ubar)) < 1e-12);
  CHECK(norm_v(mesh, layout, tab, u, ubar) < 1e-12);
}
