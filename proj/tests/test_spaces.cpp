// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/spaces.hpp"

#include <cmath>

#include "doctest.h"
#include "porohdg/quadrature.hpp"

using namespace porohdg;

namespace {

Mesh two_cell_all_dirichlet() {
  return tag_boundary(
      build_structured_square(1),
      {{[](const Eigen::Vector2d&) { return true; }, DispTag::dirichlet}},
      {{[](const Eigen::Vector2d&) { return true; }, FlowTag::pressure}});
}

Mesh square_mixed(int n) {
  const double eps = 1e-12;
  return tag_boundary(
      build_structured_square(n),
      {{[eps](const Eigen::Vector2d& x) {
          return x(1) < eps || x(1) > 1 - eps || x(0) < eps;
        },
        DispTag::dirichlet},
       {[eps](const Eigen::Vector2d& x) { return x(0) > 1 - eps; }, DispTag::traction}},
      {{[eps](const Eigen::Vector2d& x) { return x(1) < eps || x(0) > 1 - eps; },
        FlowTag::pressure},
       {[eps](const Eigen::Vector2d& x) { return x(1) > 1 - eps || x(0) < eps; },
        FlowTag::flux}});
}

}  // namespace

TEST_CASE("dof counts on the 2-cell mesh, k = 1") {
  const Mesh mesh = two_cell_all_dirichlet();
  const DofLayout hdg = build_layout(mesh, 1, Variant::hdg);
  // counting oracle: V_h = 2 cells * 2 comps * 3, Q_h = 2 * 1, trace spaces
  // per facet
  CHECK(hdg.u_size() == 12);
  CHECK(hdg.p_size() == 2);
  CHECK(hdg.z_size() == 12);
  CHECK(hdg.u_trace_size() == 20);       // 5 facets * 2 comps * 2 modes
  CHECK(hdg.facet_scalar_size() == 10);  // 5 facets * 2 modes

  const DofLayout edg = build_layout(mesh, 1, Variant::edg_hdg);
  CHECK(edg.u_trace_size() == 8);  // 2 * 4 vertices
  CHECK(edg.facet_scalar_size() == 10);

  // dimension formulas: EDG trace strictly smaller for k >= 1
  for (int k : {1, 2, 3}) {
    const DofLayout h = build_layout(mesh, k, Variant::hdg);
    const DofLayout e = build_layout(mesh, k, Variant::edg_hdg);
    CHECK(h.u_trace_size() == 2 * (k + 1) * mesh.n_facets());
    CHECK(e.u_trace_size() == 2 * (mesh.n_vertices() + (k - 1) * mesh.n_facets()));
    CHECK(e.u_trace_size() < h.u_trace_size());
  }
}

TEST_CASE("all-Dirichlet square constrains every boundary displacement trace dof") {
  const Mesh mesh = two_cell_all_dirichlet();
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    for (int node = 0; node <= 1; ++node) {
      for (int c = 0; c < 2; ++c) {
        const int d = layout.u_trace_dof(f, node, c);
        CHECK(static_cast<bool>(layout.ubar_constrained[d]) == mesh.is_boundary_facet(f));
      }
    }
  }
  // only the interior facet keeps free displacement trace dofs
  CHECK(layout.n_ubar_free == 4);
  // every pressure trace dof on the boundary is constrained too
  CHECK(layout.n_pbar_free == 2);
}

TEST_CASE("k = 0 is rejected") {
  CHECK_THROWS_AS(build_layout(two_cell_all_dirichlet(), 0, Variant::hdg),
                  std::invalid_argument);
}

TEST_CASE("total dof counts on the unit-square refinement sequence, k = 1") {
  // frozen totals for 32..2048 cells, counted from the dimension formulas:
  // per cell 2*3 (u) + 1 (pT) + 2*3 (z) + 1 (p), per facet 2*2 (ubar, hdg)
  // or 2 per vertex (edg-hdg), plus 2 + 2 pressure trace modes per facet
  const long long hdg_expected[4] = {896, 3456, 13568, 53760};
  const long long edg_expected[4] = {722, 2786, 10946, 43394};
  for (int level = 0; level < 4; ++level) {
    const Mesh mesh = build_structured_square(4 << level);
    CHECK(build_layout(mesh, 1, Variant::hdg).total_dofs() == hdg_expected[level]);
    CHECK(build_layout(mesh, 1, Variant::edg_hdg).total_dofs() == edg_expected[level]);
  }
}

TEST_CASE("layout is deterministic") {
  const Mesh mesh = square_mixed(3);
  const DofLayout a = build_layout(mesh, 2, Variant::edg_hdg);
  const DofLayout b = build_layout(mesh, 2, Variant::edg_hdg);
  CHECK(a.content_hash() == b.content_hash());
  CHECK(a.ubar_condensed == b.ubar_condensed);
  CHECK(a.pbar_condensed == b.pbar_condensed);
}

TEST_CASE("EDG trace is continuous at shared vertices") {
  const Mesh mesh = square_mixed(2);
  for (int k : {1, 2, 3}) {
    const DofLayout layout = build_layout(mesh, k, Variant::edg_hdg);
    // evaluations from two facets meeting at a vertex agree exactly because
    // the vertex dof is shared; check the dof identity itself
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      int seen = -1;
      for (int f = 0; f < mesh.n_facets(); ++f) {
        const auto& fc = mesh.facets[f];
        int node = -1;
        if (fc.vertices[0] == v) node = 0;
        if (fc.vertices[1] == v) node = k;
        if (node < 0) continue;
        const int dof = layout.u_trace_dof(f, node, 0);
        if (seen < 0)
          seen = dof;
        else
          CHECK(dof == seen);
      }
    }
    // endpoint values of the trace basis are cardinal
    Eigen::VectorXd ends(2);
    ends << 0.0, 1.0;
    const Eigen::MatrixXd vals = layout.u_trace_basis(ends);
    CHECK(vals(0, 0) == doctest::Approx(1.0));
    CHECK(vals(1, k) == doctest::Approx(1.0));
    for (int m = 1; m <= k; ++m) CHECK(std::abs(vals(0, m)) < 1e-13);
    for (int m = 0; m < k; ++m) CHECK(std::abs(vals(1, m)) < 1e-13);
  }
}

TEST_CASE("facet-wise projection reproduces constants and linears") {
  const Mesh mesh = square_mixed(2);
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const DofLayout layout = build_layout(mesh, 2, variant);
    auto all = [](int) { return true; };

    Eigen::VectorXd coeffs;
    project_u_trace(
        mesh, layout,
        [](const Eigen::Vector2d& x) { return Eigen::Vector2d(3.0 - x(0), 2.0 * x(1)); },
        all, coeffs);

    // residual at fine sample points on every facet
    const QuadratureRule fine = edge_quadrature(12);
    const Eigen::MatrixXd basis = layout.u_trace_basis(fine.points.col(0));
    for (int f = 0; f < mesh.n_facets(); ++f) {
      const Eigen::Vector2d a = mesh.vertices[mesh.facets[f].vertices[0]];
      const Eigen::Vector2d b = mesh.vertices[mesh.facets[f].vertices[1]];
      for (int q = 0; q < fine.size(); ++q) {
        const Eigen::Vector2d x = (1 - fine.points(q, 0)) * a + fine.points(q, 0) * b;
        double vx = 0.0, vy = 0.0;
        for (int m = 0; m <= layout.k; ++m) {
          vx += coeffs(layout.u_trace_dof(f, m, 0)) * basis(q, m);
          vy += coeffs(layout.u_trace_dof(f, m, 1)) * basis(q, m);
        }
        CHECK(std::abs(vx - (3.0 - x(0))) < 1e-12);
        CHECK(std::abs(vy - 2.0 * x(1)) < 1e-12);
      }
    }
  }
}

TEST_CASE("constant scalar projection is exact and boundary projection converges") {
  const Mesh mesh = square_mixed(2);
  const DofLayout layout = build_layout(mesh, 2, Variant::hdg);
  Eigen::VectorXd coeffs;
  project_facet_scalar(mesh, layout, [](const Eigen::Vector2d&) { return 4.5; },
                       [](int) { return true; }, coeffs);
  const QuadratureRule fine = edge_quadrature(10);
  const Eigen::MatrixXd basis = layout.facet_modal_basis(fine.points.col(0));
  for (int f = 0; f < mesh.n_facets(); ++f) {
    for (int q = 0; q < fine.size(); ++q) {
      double v = 0.0;
      for (int m = 0; m <= layout.k; ++m)
        v += coeffs(layout.facet_scalar_dof(f, m)) * basis(q, m);
      CHECK(v == doctest::Approx(4.5).epsilon(1e-13));
    }
  }
}

TEST_CASE("skeleton projection error of sin(pi x1) drops with the degree") {
  auto boundary_error = [](int k) {
    const Mesh mesh = square_mixed(2);
    const DofLayout layout = build_layout(mesh, k, Variant::edg_hdg);
    auto fn = [](const Eigen::Vector2d& x) {
      return Eigen::Vector2d(std::sin(M_PI * x(0)), 0.0);
    };
    auto on_boundary = [&](int f) { return mesh.is_boundary_facet(f); };
    Eigen::VectorXd coeffs;
    project_u_trace(mesh, layout, fn, on_boundary, coeffs);
    const QuadratureRule fine = edge_quadrature(16);
    const Eigen::MatrixXd basis = layout.u_trace_basis(fine.points.col(0));
    double err2 = 0.0;
    for (int f = 0; f < mesh.n_facets(); ++f) {
      if (!mesh.is_boundary_facet(f)) continue;
      const Eigen::Vector2d a = mesh.vertices[mesh.facets[f].vertices[0]];
      const Eigen::Vector2d b = mesh.vertices[mesh.facets[f].vertices[1]];
      const double len = mesh.facets[f].length;
      for (int q = 0; q < fine.size(); ++q) {
        const Eigen::Vector2d x = (1 - fine.points(q, 0)) * a + fine.points(q, 0) * b;
        double vx = 0.0;
        for (int m = 0; m <= k; ++m)
          vx += coeffs(layout.u_trace_dof(f, m, 0)) * basis(q, m);
        const double d = vx - std::sin(M_PI * x(0));
        err2 += len * fine.weights(q) * d * d;
      }
    }
    return std::sqrt(err2);
  };
  const double e2 = boundary_error(2);
  const double e3 = boundary_error(3);
  CHECK(e3 * 2.0 <= e2);
}
