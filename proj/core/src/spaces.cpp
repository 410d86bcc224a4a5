// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/spaces.hpp"

#include <map>

#include "porohdg/check.hpp"
#include "porohdg/quadrature.hpp"

namespace porohdg {

namespace {

// Barycentric Lagrange evaluation on the node set `nodes`.
Eigen::MatrixXd lagrange_values(const Eigen::VectorXd& nodes, const Eigen::VectorXd& t) {
  const int n = static_cast<int>(nodes.size());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) w(i) /= (nodes(i) - nodes(j));
  Eigen::MatrixXd out(t.size(), n);
  for (int q = 0; q < t.size(); ++q) {
    int hit = -1;
    for (int i = 0; i < n; ++i)
      if (t(q) == nodes(i)) hit = i;
    if (hit >= 0) {
      out.row(q).setZero();
      out(q, hit) = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int i = 0; i < n; ++i) denom += w(i) / (t(q) - nodes(i));
    for (int i = 0; i < n; ++i) out(q, i) = (w(i) / (t(q) - nodes(i))) / denom;
  }
  return out;
}

// Gauss-Lobatto style node set on [0, 1]: endpoints plus the k - 1 roots of
// the degree-(k-1) Jacobi polynomial with weight (1 - t)(1 + t).
Eigen::VectorXd lobatto_nodes(int k) {
  Eigen::VectorXd nodes(k + 1);
  nodes(0) = 0.0;
  nodes(k) = 1.0;
  if (k >= 2) {
    Eigen::VectorXd x, w;
    detail::gauss_jacobi(k - 1, 1.0, 1.0, x, w);
    for (int i = 0; i < k - 1; ++i) nodes(1 + i) = 0.5 * (x(i) + 1.0);
  }
  return nodes;
}

}  // namespace

int DofLayout::u_trace_dof(int facet, int node, int comp) const {
  if (variant == Variant::hdg) return (facet * (k + 1) + node) * 2 + comp;
  return 2 * edg_facet_nodes_[facet * (k + 1) + node] + comp;
}

Eigen::MatrixXd DofLayout::u_trace_basis(const Eigen::VectorXd& t) const {
  if (variant == Variant::hdg) return EdgeBasis(k).values(t);
  return lagrange_values(edg_node_params_, t);
}

Eigen::MatrixXd DofLayout::facet_modal_basis(const Eigen::VectorXd& t) const {
  return EdgeBasis(k).values(t);
}

std::uint64_t DofLayout::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(k));
  mix(static_cast<std::uint64_t>(variant));
  mix(static_cast<std::uint64_t>(n_cells));
  mix(static_cast<std::uint64_t>(n_facets));
  mix(static_cast<std::uint64_t>(n_vertices));
  std::uint64_t bits = 0;
  int nb = 0;
  for (std::uint8_t b : ubar_constrained) {
    bits = (bits << 1) | b;
    if (++nb == 64) {
      mix(bits);
      bits = 0;
      nb = 0;
    }
  }
  mix(bits);
  for (std::uint8_t b : pbar_constrained) {
    bits = (bits << 1) | b;
    if (++nb == 64) {
      mix(bits);
      bits = 0;
      nb = 0;
    }
  }
  mix(bits);
  return h;
}

DofLayout build_layout(const Mesh& mesh, int k, Variant variant) {
  POROHDG_REQUIRE(k >= 1, "build_layout: need k >= 1 (element pressures use P_{k-1})");
  DofLayout layout;
  layout.k = k;
  layout.variant = variant;
  layout.nk = (k + 1) * (k + 2) / 2;
  layout.nkm1 = k * (k + 1) / 2;
  layout.n_cells = mesh.n_cells();
  layout.n_facets = mesh.n_facets();
  layout.n_vertices = mesh.n_vertices();

  if (variant == Variant::hdg) {
    layout.u_trace_size_ = 2 * (k + 1) * mesh.n_facets();
  } else {
    // shared vertex nodes plus k - 1 interior nodes per facet
    const int n_nodes = mesh.n_vertices() + (k - 1) * mesh.n_facets();
    layout.u_trace_size_ = 2 * n_nodes;
    layout.edg_node_params_ = lobatto_nodes(k);
    layout.edg_facet_nodes_.resize(mesh.n_facets() * (k + 1));
    for (int f = 0; f < mesh.n_facets(); ++f) {
      const auto& fc = mesh.facets[f];
      layout.edg_facet_nodes_[f * (k + 1) + 0] = fc.vertices[0];
      layout.edg_facet_nodes_[f * (k + 1) + k] = fc.vertices[1];
      for (int j = 1; j < k; ++j)
        layout.edg_facet_nodes_[f * (k + 1) + j] =
            mesh.n_vertices() + f * (k - 1) + (j - 1);
    }
  }

  layout.ubar_constrained.assign(layout.u_trace_size_, 0);
  layout.pbar_constrained.assign(layout.facet_scalar_size(), 0);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (mesh.disp_tags[f] == DispTag::dirichlet) {
      // for EDG this also pins vertex nodes shared with traction facets
      for (int node = 0; node <= k; ++node)
        for (int c = 0; c < 2; ++c)
          layout.ubar_constrained[layout.u_trace_dof(f, node, c)] = 1;
    }
    if (mesh.flow_tags[f] == FlowTag::pressure) {
      for (int m = 0; m <= k; ++m)
        layout.pbar_constrained[layout.facet_scalar_dof(f, m)] = 1;
    }
  }

  layout.ubar_condensed.assign(layout.u_trace_size_, -1);
  int idx = 0;
  for (int d = 0; d < layout.u_trace_size_; ++d)
    if (!layout.ubar_constrained[d]) layout.ubar_condensed[d] = idx++;
  layout.n_ubar_free = idx;
  layout.pbar_condensed.assign(layout.facet_scalar_size(), -1);
  idx = 0;
  const int pbar_base = layout.n_ubar_free + layout.facet_scalar_size();
  for (int d = 0; d < layout.facet_scalar_size(); ++d)
    if (!layout.pbar_constrained[d]) layout.pbar_condensed[d] = pbar_base + idx++;
  layout.n_pbar_free = idx;
  return layout;
}

void project_facet_scalar(const Mesh& mesh, const DofLayout& layout,
                          const std::function<double(const Eigen::Vector2d&)>& fn,
                          const std::function<bool(int)>& facet_filter,
                          Eigen::VectorXd& coeffs) {
  if (coeffs.size() != layout.facet_scalar_size())
    coeffs = Eigen::VectorXd::Zero(layout.facet_scalar_size());
  const QuadratureRule rule = edge_quadrature(2 * layout.k + 4);
  const Eigen::VectorXd t = rule.points.col(0);
  const Eigen::MatrixXd phi = layout.facet_modal_basis(t);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!facet_filter(f)) continue;
    const Eigen::Vector2d a = mesh.vertices[mesh.facets[f].vertices[0]];
    const Eigen::Vector2d b = mesh.vertices[mesh.facets[f].vertices[1]];
    for (int m = 0; m <= layout.k; ++m) {
      double c = 0.0;
      for (int q = 0; q < rule.size(); ++q)
        c += rule.weights(q) * fn((1.0 - t(q)) * a + t(q) * b) * phi(q, m);
      coeffs(layout.facet_scalar_dof(f, m)) = c;
    }
  }
}

void project_u_trace(const Mesh& mesh, const DofLayout& layout,
                     const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn,
                     const std::function<bool(int)>& facet_filter,
                     Eigen::VectorXd& coeffs) {
  if (coeffs.size() != layout.u_trace_size())
    coeffs = Eigen::VectorXd::Zero(layout.u_trace_size());
  const QuadratureRule rule = edge_quadrature(2 * layout.k + 4);
  const Eigen::VectorXd t = rule.points.col(0);
  const Eigen::MatrixXd phi = layout.u_trace_basis(t);
  const int nb = layout.k + 1;

  if (layout.variant == Variant::hdg) {
    for (int f = 0; f < mesh.n_facets(); ++f) {
      if (!facet_filter(f)) continue;
      const Eigen::Vector2d a = mesh.vertices[mesh.facets[f].vertices[0]];
      const Eigen::Vector2d b = mesh.vertices[mesh.facets[f].vertices[1]];
      for (int m = 0; m < nb; ++m) {
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (int q = 0; q < rule.size(); ++q)
          c += rule.weights(q) * phi(q, m) * fn((1.0 - t(q)) * a + t(q) * b);
        coeffs(layout.u_trace_dof(f, m, 0)) = c(0);
        coeffs(layout.u_trace_dof(f, m, 1)) = c(1);
      }
    }
    return;
  }

  // EDG: least-squares fit of the continuous skeleton space on the selected
  // facets; nodes shared between selected facets are a single unknown.
  std::map<int, int> local_of;  // scalar node id -> local unknown
  std::vector<int> nodes;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!facet_filter(f)) continue;
    for (int m = 0; m < nb; ++m) {
      const int node = layout.u_trace_dof(f, m, 0) / 2;
      if (local_of.emplace(node, static_cast<int>(nodes.size())).second)
        nodes.push_back(node);
    }
  }
  if (nodes.empty()) return;
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!facet_filter(f)) continue;
    const Eigen::Vector2d a = mesh.vertices[mesh.facets[f].vertices[0]];
    const Eigen::Vector2d b = mesh.vertices[mesh.facets[f].vertices[1]];
    const double len = mesh.facets[f].length;
    std::vector<int> loc(nb);
    for (int m = 0; m < nb; ++m)
      loc[m] = local_of.at(layout.u_trace_dof(f, m, 0) / 2);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = len * rule.weights(q);
      const Eigen::Vector2d g = fn((1.0 - t(q)) * a + t(q) * b);
      for (int m = 0; m < nb; ++m) {
        for (int l = 0; l < nb; ++l)
          gram(loc[m], loc[l]) += w * phi(q, m) * phi(q, l);
        rhs.row(loc[m]) += w * phi(q, m) * g.transpose();
      }
    }
  }
  const Eigen::MatrixXd sol = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(rhs);
  for (int i = 0; i < n; ++i) {
    coeffs(2 * nodes[i] + 0) = sol(i, 0);
    coeffs(2 * nodes[i] + 1) = sol(i, 1);
  }
}

}  // namespace porohdg
