// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "porohdg/basis.hpp"
#include "porohdg/mesh.hpp"
#include "porohdg/params.hpp"
#include "porohdg/quadrature.hpp"
#include "porohdg/spaces.hpp"

namespace porohdg {

/// Reference-element tabulations shared by all cells of a mesh: basis values
/// and gradients at volume quadrature points and at facet quadrature points
/// for each local edge and edge orientation.
struct ReferenceTables {
  int k = 1, nk = 0, nkm1 = 0;
  TriangleBasis basis_k, basis_km1;
  QuadratureRule vol, edge;

  Eigen::MatrixXd vk, dkx, dky;  // P_k at volume points (values, ref gradients)
  Eigen::MatrixXd vkm1;          // P_{k-1} values at volume points

  struct EdgeTab {
    Eigen::MatrixXd vk, dkx, dky, vkm1;
  };
  // [local edge][orientation]; orientation 0 means the facet parameter t
  // (lower -> higher global vertex) runs along the cell's edge direction
  EdgeTab etab[3][2];

  Eigen::MatrixXd trace_u;      // displacement trace scalar basis at facet params
  Eigen::MatrixXd facet_modal;  // pressure trace basis at facet params

  ReferenceTables(const DofLayout& layout, int vol_exactness, int edge_exactness);
  explicit ReferenceTables(const DofLayout& layout);
};

/// Union of the displacement-trace dofs seen by one cell, with per-edge slot
/// tables. For EDG-HDG, vertex nodes shared by two edges of the cell occupy a
/// single slot.
struct CellTraceU {
  std::vector<int> dofs;                  // global ubar dof ids
  std::array<std::vector<int>, 3> slots;  // slots[e][node * 2 + comp]
  int size() const { return static_cast<int>(dofs.size()); }
};
CellTraceU build_cell_trace_u(const Mesh& mesh, const DofLayout& layout, int cell);

/// Geometry-resolved quadrature data for one cell.
struct ElementContext {
  int cell = 0;
  double h = 0.0;     // cell diameter
  double area = 0.0;
  AffineMap map;
  const ReferenceTables* tab = nullptr;

  Eigen::VectorXd wq;                        // physical volume weights
  Eigen::Matrix<double, Eigen::Dynamic, 2> xq;  // physical volume points
  Eigen::MatrixXd gx, gy;                    // physical gradients of P_k

  struct Edge {
    int facet = -1;
    double length = 0.0;
    bool aligned = true;
    Eigen::Vector2d normal;  // outward for this cell
    DispTag dtag = DispTag::none;
    FlowTag ftag = FlowTag::none;
    Eigen::VectorXd w;       // physical weights
    Eigen::Matrix<double, Eigen::Dynamic, 2> xq;  // physical facet points
    const ReferenceTables::EdgeTab* et = nullptr;
    Eigen::MatrixXd gx, gy;  // physical gradients of P_k at facet points
  };
  std::array<Edge, 3> edge;
};
ElementContext build_element_context(const Mesh& mesh, const ReferenceTables& tab, int cell);

/// Element blocks of the elasticity form: volume strain term, stabilization
/// 2 beta mu / h_K <u - ubar, v - vbar>, and the two symmetrizing consistency
/// terms. Row/column order of element dofs is component-blocked: dof = comp *
/// nk + i.
struct LocalAh {
  Eigen::MatrixXd uu;  // element x element
  Eigen::MatrixXd ut;  // element (test) x trace (trial); the other block is ut^T
  Eigen::MatrixXd tt;  // trace x trace
};
LocalAh assemble_ah_local(const ElementContext& ctx, const ModelParams& params,
                          const CellTraceU& tr);

/// Element blocks of b_h(v, q) = -(q, div v) + <qbar, (v - vbar) . n>.
/// Rows of the facet blocks are edge-major modal dofs: e * (k+1) + m. The
/// velocity role b_h((w, 0), q) uses q_v and qbar_v only.
struct LocalBh {
  Eigen::MatrixXd q_v;        // nkm1 x 2nk
  Eigen::MatrixXd qbar_v;     // 3(k+1) x 2nk
  Eigen::MatrixXd qbar_vbar;  // 3(k+1) x trace size
};
LocalBh assemble_bh_local(const ElementContext& ctx, const CellTraceU& tr);

/// Element mass matrices (exact for the orthonormal bases up to rounding).
Eigen::MatrixXd scalar_mass_local(const ElementContext& ctx);    // nkm1 x nkm1
Eigen::MatrixXd vector_mass_k_local(const ElementContext& ctx);  // 2nk x 2nk

/// Mesh-dependent norms: |||v|||_v^2 = ||eps(v)||^2 + sum_K h_K^{-1}
/// ||v - vbar||^2_dK and |||q|||_q^2 = ||q||^2 + sum_K h_K ||qbar||^2_dK.
double norm_v(const Mesh& mesh, const DofLayout& layout, const ReferenceTables& tab,
              const Eigen::VectorXd& u, const Eigen::VectorXd& ubar);
double norm_q(const Mesh& mesh, const DofLayout& layout, const ReferenceTables& tab,
              const Eigen::VectorXd& q, const Eigen::VectorXd& qbar);

/// a_h(u, u) for a coefficient pair (quadratic form of the assembled blocks).
double ah_energy(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                 const ReferenceTables& tab, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& ubar);

// -- dense assemblies on small meshes (stability diagnostics) --------------
//
// Pair numbering: displacement pairs are [element u | free ubar], total
// pressure pairs [element pT | all pTbar], pore pressure pairs [element p |
// free pbar]. Constrained trace dofs are eliminated (homogeneous).

Eigen::MatrixXd dense_ah(const Mesh&, const DofLayout&, const ModelParams&);
Eigen::MatrixXd dense_gram_v(const Mesh&, const DofLayout&);
/// Rows: displacement pairs; cols: total-pressure pairs; entries b_h(v, q).
Eigen::MatrixXd dense_bh(const Mesh&, const DofLayout&);
/// Rows: element velocity dofs; cols: pore-pressure pairs; b_h((w, 0), q).
Eigen::MatrixXd dense_bh_velocity(const Mesh&, const DofLayout&);
Eigen::MatrixXd dense_gram_q(const Mesh&, const DofLayout&, bool constrain_pbar);
Eigen::MatrixXd dense_mass_velocity(const Mesh&, const DofLayout&);

/// Smallest generalized eigenvalue of (A_h, mu G_v) over the constrained
/// displacement pairs: positive certifies coercivity of a_h on this mesh for
/// the chosen penalty. A nonpositive value is a report, not an error.
struct CoercivityReport {
  double ratio = 0.0;
  bool coercive = false;
};
CoercivityReport coercivity_check(const Mesh& mesh, const DofLayout& layout,
                                  const ModelParams& params);

}  // namespace porohdg
