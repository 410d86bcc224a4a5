// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "porohdg/basis.hpp"
#include "porohdg/mesh.hpp"

namespace porohdg {

/// Trace-space variant: HDG uses a facet-discontinuous displacement trace,
/// EDG-HDG a continuous skeleton trace. Pressure traces are facet-
/// discontinuous in both variants.
enum class Variant { hdg, edg_hdg };

/// Degree-of-freedom maps for the five discrete spaces. Element fields (u,
/// p_T, z, p) are blocked contiguously per cell; pressure traces are modal
/// per facet; the displacement trace is modal per facet (HDG) or nodal with
/// shared vertex values (EDG-HDG). Immutable after build_layout.
class DofLayout {
 public:
  int k = 1;
  Variant variant = Variant::hdg;
  int nk = 0;    // dim P_k on a triangle
  int nkm1 = 0;  // dim P_{k-1}
  int n_cells = 0, n_facets = 0, n_vertices = 0;

  // -- element fields ------------------------------------------------------
  int u_size() const { return 2 * nk * n_cells; }
  int p_size() const { return nkm1 * n_cells; }          // also p_T
  int z_size() const { return 2 * nk * n_cells; }
  int cell_u_offset(int c) const { return 2 * nk * c; }  // also z
  int cell_p_offset(int c) const { return nkm1 * c; }    // also p_T

  // -- displacement trace --------------------------------------------------
  /// Total number of ubar coefficients (before constraints).
  int u_trace_size() const { return u_trace_size_; }
  /// Scalar node count per facet is k + 1 in both variants; node 0 sits at
  /// the lower-index vertex (t = 0), node k at the higher-index vertex.
  int u_trace_dof(int facet, int node, int comp) const;
  /// Scalar displacement-trace basis (columns follow the node order above)
  /// at facet parameters t in [0, 1].
  Eigen::MatrixXd u_trace_basis(const Eigen::VectorXd& t) const;

  // -- pressure traces (modal, per facet) -----------------------------------
  int facet_scalar_size() const { return (k + 1) * n_facets; }  // pTbar and pbar
  int facet_scalar_dof(int facet, int mode) const { return facet * (k + 1) + mode; }
  Eigen::MatrixXd facet_modal_basis(const Eigen::VectorXd& t) const;

  // -- essential constraints -----------------------------------------------
  std::vector<std::uint8_t> ubar_constrained;  // per ubar dof (Gamma_D)
  std::vector<std::uint8_t> pbar_constrained;  // per pbar dof (Gamma_P)
  int n_ubar_free = 0, n_pbar_free = 0;

  // -- condensed (facet-only) numbering: [ubar free | pTbar | pbar free] ----
  std::vector<int> ubar_condensed;  // -1 when constrained
  std::vector<int> pbar_condensed;
  int pTbar_condensed(int dof) const { return n_ubar_free + dof; }
  int n_condensed() const { return n_ubar_free + facet_scalar_size() + n_pbar_free; }

  /// All coefficients of the seven fields (constrained trace dofs included).
  int total_dofs() const {
    return u_size() + 2 * p_size() + z_size() + u_trace_size() + 2 * facet_scalar_size();
  }

  std::uint64_t content_hash() const;

 private:
  friend DofLayout build_layout(const Mesh&, int, Variant);
  int u_trace_size_ = 0;
  std::vector<int> edg_facet_nodes_;  // (k+1) node ids per facet (EDG only)
  Eigen::VectorXd edg_node_params_;   // nodal positions in [0, 1]
};

/// Build the layout for a tagged mesh. Requires k >= 1 (the element pressure
/// space uses P_{k-1}). Deterministic for fixed inputs.
DofLayout build_layout(const Mesh& mesh, int k, Variant variant);

/// Facet-wise L2 projection of a scalar function onto the modal facet space,
/// written into `coeffs` (full facet_scalar_size() vector) for every facet
/// selected by `facet_filter`.
void project_facet_scalar(const Mesh& mesh, const DofLayout& layout,
                          const std::function<double(const Eigen::Vector2d&)>& fn,
                          const std::function<bool(int)>& facet_filter,
                          Eigen::VectorXd& coeffs);

/// Projection of a vector function onto the displacement trace space over the
/// selected facets: per-facet L2 projection for HDG, the continuous skeleton
/// function minimizing the skeleton L2 distance for EDG-HDG. Writes into
/// `coeffs` (full u_trace_size() vector).
void project_u_trace(const Mesh& mesh, const DofLayout& layout,
                     const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn,
                     const std::function<bool(int)>& facet_filter,
                     Eigen::VectorXd& coeffs);

}  // namespace porohdg
