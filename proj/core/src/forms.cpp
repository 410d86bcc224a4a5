// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/forms.hpp"

#include <map>

#include "porohdg/check.hpp"

namespace porohdg {

namespace {

// reference edge endpoints in cell orientation order (edge e runs from local
// vertex (e+1)%3 to (e+2)%3)
const Eigen::Vector2d ref_vertex[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

Eigen::Matrix<double, Eigen::Dynamic, 2> edge_ref_points(int e, bool aligned,
                                                         const Eigen::VectorXd& t) {
  const Eigen::Vector2d a = ref_vertex[(e + 1) % 3];
  const Eigen::Vector2d b = ref_vertex[(e + 2) % 3];
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(t.size(), 2);
  for (int q = 0; q < t.size(); ++q) {
    const double tau = aligned ? t(q) : 1.0 - t(q);
    pts.row(q) = ((1.0 - tau) * a + tau * b).transpose();
  }
  return pts;
}

}  // namespace

ReferenceTables::ReferenceTables(const DofLayout& layout, int vol_exactness,
                                 int edge_exactness)
    : k(layout.k),
      nk(layout.nk),
      nkm1(layout.nkm1),
      basis_k(layout.k),
      basis_km1(layout.k - 1),
      vol(triangle_quadrature(vol_exactness)),
      edge(edge_quadrature(edge_exactness)) {
  basis_k.tabulate(vol.points, &vk, &dkx, &dky);
  vkm1 = basis_km1.values(vol.points);
  const Eigen::VectorXd t = edge.points.col(0);
  for (int e = 0; e < 3; ++e) {
    for (int o = 0; o < 2; ++o) {
      const auto pts = edge_ref_points(e, o == 0, t);
      basis_k.tabulate(pts, &etab[e][o].vk, &etab[e][o].dkx, &etab[e][o].dky);
      etab[e][o].vkm1 = basis_km1.values(pts);
    }
  }
  trace_u = layout.u_trace_basis(t);
  facet_modal = layout.facet_modal_basis(t);
}

ReferenceTables::ReferenceTables(const DofLayout& layout)
    : ReferenceTables(layout, 2 * layout.k + 2, 2 * layout.k + 2) {}

CellTraceU build_cell_trace_u(const Mesh& mesh, const DofLayout& layout, int cell) {
  CellTraceU tr;
  std::map<int, int> slot_of;
  for (int e = 0; e < 3; ++e) {
    const int f = mesh.cell_facets[cell][e];
    tr.slots[e].resize(2 * (layout.k + 1));
    for (int node = 0; node <= layout.k; ++node) {
      for (int c = 0; c < 2; ++c) {
        const int g = layout.u_trace_dof(f, node, c);
        auto [it, inserted] = slot_of.emplace(g, static_cast<int>(tr.dofs.size()));
        if (inserted) tr.dofs.push_back(g);
        tr.slots[e][node * 2 + c] = it->second;
      }
    }
  }
  return tr;
}

ElementContext build_element_context(const Mesh& mesh, const ReferenceTables& tab,
                                     int cell) {
  ElementContext ctx;
  ctx.cell = cell;
  ctx.tab = &tab;
  const auto& kc = mesh.cells[cell];
  ctx.map = affine_map(mesh.vertices[kc[0]], mesh.vertices[kc[1]], mesh.vertices[kc[2]]);
  ctx.area = 0.5 * ctx.map.det;
  ctx.h = mesh.cell_diameter(cell);

  const int nq = tab.vol.size();
  ctx.wq = tab.vol.weights * ctx.map.det;
  ctx.xq.resize(nq, 2);
  for (int q = 0; q < nq; ++q)
    ctx.xq.row(q) = ctx.map.to_physical(tab.vol.points.row(q).transpose()).transpose();
  const Eigen::Matrix2d& ji = ctx.map.inverse_jacobian;
  ctx.gx = tab.dkx * ji(0, 0) + tab.dky * ji(1, 0);
  ctx.gy = tab.dkx * ji(0, 1) + tab.dky * ji(1, 1);

  const Eigen::VectorXd t = tab.edge.points.col(0);
  for (int e = 0; e < 3; ++e) {
    auto& ed = ctx.edge[e];
    ed.facet = mesh.cell_facets[cell][e];
    const Facet& fc = mesh.facets[ed.facet];
    ed.length = fc.length;
    ed.normal = mesh.normal_sign(ed.facet, cell) * fc.normal;
    ed.dtag = mesh.disp_tags[ed.facet];
    ed.ftag = mesh.flow_tags[ed.facet];
    const auto ev = cell_edge_vertices(kc, e);
    ed.aligned = ev[0] < ev[1];
    ed.et = &tab.etab[e][ed.aligned ? 0 : 1];
    ed.w = tab.edge.weights * ed.length;
    const Eigen::Vector2d lo = mesh.vertices[fc.vertices[0]];
    const Eigen::Vector2d hi = mesh.vertices[fc.vertices[1]];
    ed.xq.resize(t.size(), 2);
    for (int q = 0; q < t.size(); ++q)
      ed.xq.row(q) = ((1.0 - t(q)) * lo + t(q) * hi).transpose();
    ed.gx = ed.et->dkx * ji(0, 0) + ed.et->dky * ji(1, 0);
    ed.gy = ed.et->dkx * ji(0, 1) + ed.et->dky * ji(1, 1);
  }
  return ctx;
}

LocalAh assemble_ah_local(const ElementContext& ctx, const ModelParams& params,
                          const CellTraceU& tr) {
  const int nk = ctx.tab->nk;
  const int nut = tr.size();
  const int k = ctx.tab->k;
  const double two_mu = 2.0 * params.mu();
  LocalAh A;
  A.uu = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
  A.ut = Eigen::MatrixXd::Zero(2 * nk, nut);
  A.tt = Eigen::MatrixXd::Zero(nut, nut);

  // (2 mu eps(u), eps(v))
  for (int q = 0; q < ctx.wq.size(); ++q) {
    const double w = two_mu * ctx.wq(q);
    for (int i = 0; i < nk; ++i) {
      const double gxi = ctx.gx(q, i), gyi = ctx.gy(q, i);
      for (int j = 0; j < nk; ++j) {
        const double gxj = ctx.gx(q, j), gyj = ctx.gy(q, j);
        A.uu(i, j) += w * (gxi * gxj + 0.5 * gyi * gyj);
        A.uu(i, nk + j) += w * 0.5 * gyi * gxj;
        A.uu(nk + i, j) += w * 0.5 * gxi * gyj;
        A.uu(nk + i, nk + j) += w * (gyi * gyj + 0.5 * gxi * gxj);
      }
    }
  }

  const double pen = 2.0 * params.penalty() * params.mu() / ctx.h;
  for (int e = 0; e < 3; ++e) {
    const auto& ed = ctx.edge[e];
    const auto& tv = ed.et->vk;
    const Eigen::MatrixXd& tru = ctx.tab->trace_u;
    const double n0 = ed.normal(0), n1 = ed.normal(1);
    for (int q = 0; q < ed.w.size(); ++q) {
      const double w = ed.w(q);
      // 2 mu eps(phi_i e_c) n at this point, for both components
      // c = 0: (gx n0 + gy n1 / 2, gy n0 / 2); c = 1: (gx n1 / 2, gx n0 / 2 + gy n1)
      for (int i = 0; i < nk; ++i) {
        const double gxi = ed.gx(q, i), gyi = ed.gy(q, i);
        const double s0x = two_mu * (gxi * n0 + 0.5 * gyi * n1);
        const double s0y = two_mu * (0.5 * gyi * n0);
        const double s1x = two_mu * (0.5 * gxi * n1);
        const double s1y = two_mu * (0.5 * gxi * n0 + gyi * n1);
        for (int j = 0; j < nk; ++j) {
          const double pw = w * pen * tv(q, i) * tv(q, j);
          A.uu(i, j) += pw;
          A.uu(nk + i, nk + j) += pw;
          // - <2 mu eps(u) n, v> - <2 mu eps(v) n, u>
          const double gxj = ed.gx(q, j), gyj = ed.gy(q, j);
          const double t0x = two_mu * (gxj * n0 + 0.5 * gyj * n1);
          const double t0y = two_mu * (0.5 * gyj * n0);
          const double t1x = two_mu * (0.5 * gxj * n1);
          const double t1y = two_mu * (0.5 * gxj * n0 + gyj * n1);
          A.uu(i, j) -= w * (t0x * tv(q, i) + s0x * tv(q, j));
          A.uu(i, nk + j) -= w * (t1x * tv(q, i) + s0y * tv(q, j));
          A.uu(nk + i, j) -= w * (t0y * tv(q, i) + s1x * tv(q, j));
          A.uu(nk + i, nk + j) -= w * (t1y * tv(q, i) + s1y * tv(q, j));
        }
        for (int m = 0; m <= k; ++m) {
          const double tm = tru(q, m);
          const int sx = tr.slots[e][m * 2 + 0];
          const int sy = tr.slots[e][m * 2 + 1];
          // - pen <ubar, v> + <2 mu eps(v) n, ubar>
          A.ut(i, sx) += w * (-pen * tv(q, i) * tm + s0x * tm);
          A.ut(i, sy) += w * (s0y * tm);
          A.ut(nk + i, sx) += w * (s1x * tm);
          A.ut(nk + i, sy) += w * (-pen * tv(q, i) * tm + s1y * tm);
        }
      }
      for (int m = 0; m <= k; ++m) {
        for (int l = 0; l <= k; ++l) {
          const double pw = w * pen * tru(q, m) * tru(q, l);
          A.tt(tr.slots[e][m * 2 + 0], tr.slots[e][l * 2 + 0]) += pw;
          A.tt(tr.slots[e][m * 2 + 1], tr.slots[e][l * 2 + 1]) += pw;
        }
      }
    }
  }
  return A;
}

LocalBh assemble_bh_local(const ElementContext& ctx, const CellTraceU& tr) {
  const int nk = ctx.tab->nk;
  const int nkm1 = ctx.tab->nkm1;
  const int k = ctx.tab->k;
  LocalBh B;
  B.q_v = Eigen::MatrixXd::Zero(nkm1, 2 * nk);
  B.qbar_v = Eigen::MatrixXd::Zero(3 * (k + 1), 2 * nk);
  B.qbar_vbar = Eigen::MatrixXd::Zero(3 * (k + 1), tr.size());

  for (int q = 0; q < ctx.wq.size(); ++q) {
    const double w = ctx.wq(q);
    for (int r = 0; r < nkm1; ++r) {
      const double pv = w * ctx.tab->vkm1(q, r);
      for (int i = 0; i < nk; ++i) {
        B.q_v(r, i) -= pv * ctx.gx(q, i);
        B.q_v(r, nk + i) -= pv * ctx.gy(q, i);
      }
    }
  }
  for (int e = 0; e < 3; ++e) {
    const auto& ed = ctx.edge[e];
    const auto& tv = ed.et->vk;
    const Eigen::MatrixXd& fm = ctx.tab->facet_modal;
    const Eigen::MatrixXd& tru = ctx.tab->trace_u;
    const double n0 = ed.normal(0), n1 = ed.normal(1);
    for (int q = 0; q < ed.w.size(); ++q) {
      const double w = ed.w(q);
      for (int m = 0; m <= k; ++m) {
        const int row = e * (k + 1) + m;
        const double qm = w * fm(q, m);
        for (int i = 0; i < nk; ++i) {
          B.qbar_v(row, i) += qm * tv(q, i) * n0;
          B.qbar_v(row, nk + i) += qm * tv(q, i) * n1;
        }
        for (int l = 0; l <= k; ++l) {
          const double tl = tru(q, l);
          B.qbar_vbar(row, tr.slots[e][l * 2 + 0]) -= qm * tl * n0;
          B.qbar_vbar(row, tr.slots[e][l * 2 + 1]) -= qm * tl * n1;
        }
      }
    }
  }
  return B;
}

Eigen::MatrixXd scalar_mass_local(const ElementContext& ctx) {
  const auto& v = ctx.tab->vkm1;
  return v.transpose() * ctx.wq.asDiagonal() * v;
}

Eigen::MatrixXd vector_mass_k_local(const ElementContext& ctx) {
  const int nk = ctx.tab->nk;
  const Eigen::MatrixXd m = ctx.tab->vk.transpose() * ctx.wq.asDiagonal() * ctx.tab->vk;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
  out.topLeftCorner(nk, nk) = m;
  out.bottomRightCorner(nk, nk) = m;
  return out;
}

namespace {

// accumulate ||eps(v)||^2_K and sum_e h^{-1} ||v - vbar||^2_F from coefficients
double norm_v_cell(const ElementContext& ctx, const DofLayout& layout,
                   const CellTraceU& tr, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& ubar) {
  const int nk = ctx.tab->nk;
  const int off = layout.cell_u_offset(ctx.cell);
  double acc = 0.0;
  for (int q = 0; q < ctx.wq.size(); ++q) {
    double e11 = 0.0, e22 = 0.0, e12 = 0.0;
    for (int i = 0; i < nk; ++i) {
      const double cx = u(off + i), cy = u(off + nk + i);
      e11 += cx * ctx.gx(q, i);
      e22 += cy * ctx.gy(q, i);
      e12 += 0.5 * (cx * ctx.gy(q, i) + cy * ctx.gx(q, i));
    }
    acc += ctx.wq(q) * (e11 * e11 + e22 * e22 + 2.0 * e12 * e12);
  }
  for (int e = 0; e < 3; ++e) {
    const auto& ed = ctx.edge[e];
    for (int q = 0; q < ed.w.size(); ++q) {
      double dx = 0.0, dy = 0.0;
      for (int i = 0; i < nk; ++i) {
        dx += u(off + i) * ed.et->vk(q, i);
        dy += u(off + nk + i) * ed.et->vk(q, i);
      }
      for (int m = 0; m <= layout.k; ++m) {
        const double tm = ctx.tab->trace_u(q, m);
        dx -= ubar(tr.dofs[tr.slots[e][m * 2 + 0]]) * tm;
        dy -= ubar(tr.dofs[tr.slots[e][m * 2 + 1]]) * tm;
      }
      acc += ed.w(q) / ctx.h * (dx * dx + dy * dy);
    }
  }
  return acc;
}

}  // namespace

double norm_v(const Mesh& mesh, const DofLayout& layout, const ReferenceTables& tab,
              const Eigen::VectorXd& u, const Eigen::VectorXd& ubar) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    acc += norm_v_cell(ctx, layout, tr, u, ubar);
  }
  return std::sqrt(acc);
}

double norm_q(const Mesh& mesh, const DofLayout& layout, const ReferenceTables& tab,
              const Eigen::VectorXd& q, const Eigen::VectorXd& qbar) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int off = layout.cell_p_offset(c);
    for (int iq = 0; iq < ctx.wq.size(); ++iq) {
      double val = 0.0;
      for (int i = 0; i < layout.nkm1; ++i) val += q(off + i) * ctx.tab->vkm1(iq, i);
      acc += ctx.wq(iq) * val * val;
    }
    for (int e = 0; e < 3; ++e) {
      const auto& ed = ctx.edge[e];
      for (int iq = 0; iq < ed.w.size(); ++iq) {
        double val = 0.0;
        for (int m = 0; m <= layout.k; ++m)
          val += qbar(layout.facet_scalar_dof(ed.facet, m)) * ctx.tab->facet_modal(iq, m);
        acc += ctx.h * ed.w(iq) * val * val;
      }
    }
  }
  return std::sqrt(acc);
}

double ah_energy(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                 const ReferenceTables& tab, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& ubar) {
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const LocalAh A = assemble_ah_local(ctx, params, tr);
    const int nk = layout.nk;
    Eigen::VectorXd ue(2 * nk), te(tr.size());
    ue = u.segment(layout.cell_u_offset(c), 2 * nk);
    for (int s = 0; s < tr.size(); ++s) te(s) = ubar(tr.dofs[s]);
    acc += ue.dot(A.uu * ue) + 2.0 * ue.dot(A.ut * te) + te.dot(A.tt * te);
  }
  return acc;
}

namespace {

// u-pair numbering: [element u | free ubar]; -1 for constrained trace dofs
int upair_trace_index(const DofLayout& layout, int ubar_dof) {
  const int idx = layout.ubar_condensed[ubar_dof];
  return idx < 0 ? -1 : layout.u_size() + idx;
}
int upair_total(const DofLayout& layout) { return layout.u_size() + layout.n_ubar_free; }

// q-pair numbering for the total pressure: [element pT | all pTbar]
int qpair_total(const DofLayout& layout) {
  return layout.p_size() + layout.facet_scalar_size();
}

// p-pair numbering with the essential constraint: [element p | free pbar]
int ppair_trace_index(const DofLayout& layout, int pbar_dof) {
  const int idx = layout.pbar_condensed[pbar_dof];
  if (idx < 0) return -1;
  return layout.p_size() + (idx - layout.n_ubar_free - layout.facet_scalar_size());
}

}  // namespace

Eigen::MatrixXd dense_ah(const Mesh& mesh, const DofLayout& layout,
                         const ModelParams& params) {
  const ReferenceTables tab(layout);
  const int n = upair_total(layout);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const LocalAh loc = assemble_ah_local(ctx, params, tr);
    const int off = layout.cell_u_offset(c);
    std::vector<int> tg(tr.size());
    for (int s = 0; s < tr.size(); ++s) tg[s] = upair_trace_index(layout, tr.dofs[s]);
    A.block(off, off, 2 * layout.nk, 2 * layout.nk) += loc.uu;
    for (int s = 0; s < tr.size(); ++s) {
      if (tg[s] < 0) continue;
      for (int i = 0; i < 2 * layout.nk; ++i) {
        A(off + i, tg[s]) += loc.ut(i, s);
        A(tg[s], off + i) += loc.ut(i, s);
      }
      for (int s2 = 0; s2 < tr.size(); ++s2)
        if (tg[s2] >= 0) A(tg[s], tg[s2]) += loc.tt(s, s2);
    }
  }
  return A;
}

Eigen::MatrixXd dense_gram_v(const Mesh& mesh, const DofLayout& layout) {
  // same structure as dense_ah with 2 mu -> 1 on the strain term and
  // 2 beta mu / h -> 1 / h on the jump term, no consistency terms
  const ReferenceTables tab(layout);
  const int n = upair_total(layout);
  const int nk = layout.nk;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const int off = layout.cell_u_offset(c);
    std::vector<int> tg(tr.size());
    for (int s = 0; s < tr.size(); ++s) tg[s] = upair_trace_index(layout, tr.dofs[s]);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const double w = ctx.wq(q);
      for (int i = 0; i < nk; ++i) {
        const double gxi = ctx.gx(q, i), gyi = ctx.gy(q, i);
        for (int j = 0; j < nk; ++j) {
          const double gxj = ctx.gx(q, j), gyj = ctx.gy(q, j);
          G(off + i, off + j) += w * (gxi * gxj + 0.5 * gyi * gyj);
          G(off + i, off + nk + j) += w * 0.5 * gyi * gxj;
          G(off + nk + i, off + j) += w * 0.5 * gxi * gyj;
          G(off + nk + i, off + nk + j) += w * (gyi * gyj + 0.5 * gxi * gxj);
        }
      }
    }
    for (int e = 0; e < 3; ++e) {
      const auto& ed = ctx.edge[e];
      for (int q = 0; q < ed.w.size(); ++q) {
        const double w = ed.w(q) / ctx.h;
        // jump rows/cols: element value minus trace value, per component
        for (int comp = 0; comp < 2; ++comp) {
          auto idx = [&](int which) -> int {  // which < nk: element i, else trace m
            if (which < nk) return off + comp * nk + which;
            return tg[tr.slots[e][(which - nk) * 2 + comp]];
          };
          auto val = [&](int which) -> double {
            if (which < nk) return ed.et->vk(q, which);
            return -ctx.tab->trace_u(q, which - nk);
          };
          for (int a = 0; a < nk + layout.k + 1; ++a) {
            const int ia = idx(a);
            if (ia < 0) continue;
            for (int b = 0; b < nk + layout.k + 1; ++b) {
              const int ib = idx(b);
              if (ib < 0) continue;
              G(ia, ib) += w * val(a) * val(b);
            }
          }
        }
      }
    }
  }
  return G;
}

Eigen::MatrixXd dense_bh(const Mesh& mesh, const DofLayout& layout) {
  const ReferenceTables tab(layout);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(upair_total(layout), qpair_total(layout));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const LocalBh loc = assemble_bh_local(ctx, tr);
    const int uoff = layout.cell_u_offset(c);
    const int poff = layout.cell_p_offset(c);
    for (int r = 0; r < layout.nkm1; ++r)
      for (int i = 0; i < 2 * layout.nk; ++i) B(uoff + i, poff + r) += loc.q_v(r, i);
    for (int e = 0; e < 3; ++e) {
      for (int m = 0; m <= layout.k; ++m) {
        const int row = e * (layout.k + 1) + m;
        const int col =
            layout.p_size() + layout.facet_scalar_dof(mesh.cell_facets[c][e], m);
        for (int i = 0; i < 2 * layout.nk; ++i)
          B(uoff + i, col) += loc.qbar_v(row, i);
        for (int s = 0; s < tr.size(); ++s) {
          const int ti = upair_trace_index(layout, tr.dofs[s]);
          if (ti >= 0) B(ti, col) += loc.qbar_vbar(row, s);
        }
      }
    }
  }
  return B;
}

Eigen::MatrixXd dense_bh_velocity(const Mesh& mesh, const DofLayout& layout) {
  const ReferenceTables tab(layout);
  const int ncols = layout.p_size() + layout.n_pbar_free;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(layout.z_size(), ncols);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const LocalBh loc = assemble_bh_local(ctx, tr);
    const int uoff = layout.cell_u_offset(c);
    const int poff = layout.cell_p_offset(c);
    for (int r = 0; r < layout.nkm1; ++r)
      for (int i = 0; i < 2 * layout.nk; ++i) B(uoff + i, poff + r) += loc.q_v(r, i);
    for (int e = 0; e < 3; ++e) {
      for (int m = 0; m <= layout.k; ++m) {
        const int col = ppair_trace_index(
            layout, layout.facet_scalar_dof(mesh.cell_facets[c][e], m));
        if (col < 0) continue;
        const int row = e * (layout.k + 1) + m;
        for (int i = 0; i < 2 * layout.nk; ++i)
          B(uoff + i, col) += loc.qbar_v(row, i);
      }
    }
  }
  return B;
}

Eigen::MatrixXd dense_gram_q(const Mesh& mesh, const DofLayout& layout,
                             bool constrain_pbar) {
  const ReferenceTables tab(layout);
  const int n = constrain_pbar ? layout.p_size() + layout.n_pbar_free : qpair_total(layout);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int poff = layout.cell_p_offset(c);
    const Eigen::MatrixXd m = scalar_mass_local(ctx);
    G.block(poff, poff, layout.nkm1, layout.nkm1) += m;
    for (int e = 0; e < 3; ++e) {
      const auto& ed = ctx.edge[e];
      for (int q = 0; q < ed.w.size(); ++q) {
        const double w = ctx.h * ed.w(q);
        for (int a = 0; a <= layout.k; ++a) {
          const int da = layout.facet_scalar_dof(ed.facet, a);
          const int ia = constrain_pbar ? ppair_trace_index(layout, da)
                                        : layout.p_size() + da;
          if (ia < 0) continue;
          for (int b = 0; b <= layout.k; ++b) {
            const int db = layout.facet_scalar_dof(ed.facet, b);
            const int ib = constrain_pbar ? ppair_trace_index(layout, db)
                                          : layout.p_size() + db;
            if (ib < 0) continue;
            G(ia, ib) += w * ctx.tab->facet_modal(q, a) * ctx.tab->facet_modal(q, b);
          }
        }
      }
    }
  }
  return G;
}

Eigen::MatrixXd dense_mass_velocity(const Mesh& mesh, const DofLayout& layout) {
  const ReferenceTables tab(layout);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(layout.z_size(), layout.z_size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    M.block(layout.cell_u_offset(c), layout.cell_u_offset(c), 2 * layout.nk,
            2 * layout.nk) += vector_mass_k_local(ctx);
  }
  return M;
}

CoercivityReport coercivity_check(const Mesh& mesh, const DofLayout& layout,
                                  const ModelParams& params) {
  const Eigen::MatrixXd A = dense_ah(mesh, layout, params);
  const Eigen::MatrixXd G = params.mu() * dense_gram_v(mesh, layout);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (A + A.transpose()), G, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  POROHDG_CHECK(es.info() == Eigen::Success, "coercivity_check: eigensolver failed");
  CoercivityReport rep;
  rep.ratio = es.eigenvalues().minCoeff();
  rep.coercive = rep.ratio > 0.0;
  return rep;
}

}  // namespace porohdg
