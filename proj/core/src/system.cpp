// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/system.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "porohdg/check.hpp"

namespace porohdg {

bool SolutionState::finite() const {
  for (const auto* v : {&u, &pT, &z, &p, &ubar, &pTbar, &pbar})
    if (!v->allFinite()) return false;
  return true;
}

SolutionState zero_state(const DofLayout& layout) {
  SolutionState s;
  s.u = Eigen::VectorXd::Zero(layout.u_size());
  s.pT = Eigen::VectorXd::Zero(layout.p_size());
  s.z = Eigen::VectorXd::Zero(layout.z_size());
  s.p = Eigen::VectorXd::Zero(layout.p_size());
  s.ubar = Eigen::VectorXd::Zero(layout.u_trace_size());
  s.pTbar = Eigen::VectorXd::Zero(layout.facet_scalar_size());
  s.pbar = Eigen::VectorXd::Zero(layout.facet_scalar_size());
  return s;
}

void prescribed_trace_values(const Mesh& mesh, const DofLayout& layout,
                             const ProblemData& data, double t,
                             Eigen::VectorXd& ubar_values, Eigen::VectorXd& pbar_values) {
  ubar_values = Eigen::VectorXd::Zero(layout.u_trace_size());
  pbar_values = Eigen::VectorXd::Zero(layout.facet_scalar_size());
  if (data.displacement_bc) {
    project_u_trace(
        mesh, layout, [&](const Eigen::Vector2d& x) { return data.displacement_bc(x, t); },
        [&](int f) { return mesh.disp_tags[f] == DispTag::dirichlet; }, ubar_values);
  }
  if (data.pressure_bc) {
    project_facet_scalar(
        mesh, layout, [&](const Eigen::Vector2d& x) { return data.pressure_bc(x, t); },
        [&](int f) { return mesh.flow_tags[f] == FlowTag::pressure; }, pbar_values);
  }
}

// ---------------------------------------------------------------------------
// shared local assembly
// ---------------------------------------------------------------------------

namespace {

// local interior ordering: [u (2nk) | pT (nkm1) | z (2nk) | p (nkm1)];
// local trace ordering:    [ubar union | pTbar edge-major | pbar edge-major]
struct LocalOffsets {
  int nk = 0, nkm1 = 0, k = 0;
  int u = 0, pT = 0, z = 0, p = 0, n_i = 0;
  int nut = 0, t_u = 0, t_pT = 0, t_p = 0, n_t = 0;

  LocalOffsets() = default;
  LocalOffsets(const DofLayout& layout, int nut_) {
    nk = layout.nk;
    nkm1 = layout.nkm1;
    k = layout.k;
    pT = 2 * nk;
    z = 2 * nk + nkm1;
    p = 4 * nk + nkm1;
    n_i = 4 * nk + 2 * nkm1;
    nut = nut_;
    t_pT = nut;
    t_p = nut + 3 * (k + 1);
    n_t = nut + 6 * (k + 1);
  }
};

struct LocalSystem {
  CellTraceU tru;
  LocalOffsets off;
  Eigen::MatrixXd K;

  LocalSystem(const DofLayout& layout, CellTraceU tr)
      : tru(std::move(tr)), off(layout, tru.size()) {}
};

// Full local step matrix in the ordering above; block structure of the step
// equations with the new-level storage terms weighted by w.w_new.
LocalSystem build_local_system(const Mesh& mesh, const DofLayout& layout,
                               const ModelParams& params, SchemeWeights w,
                               const ReferenceTables& tab, int cell) {
  const ElementContext ctx = build_element_context(mesh, tab, cell);
  LocalSystem loc(layout, build_cell_trace_u(mesh, layout, cell));
  const auto& o = loc.off;
  loc.K = Eigen::MatrixXd::Zero(o.n_i + o.n_t, o.n_i + o.n_t);

  const LocalAh A = assemble_ah_local(ctx, params, loc.tru);
  const LocalBh B = assemble_bh_local(ctx, loc.tru);
  const Eigen::MatrixXd M = scalar_mass_local(ctx);
  const Eigen::MatrixXd Mz = vector_mass_k_local(ctx);

  const double lam_inv = 1.0 / params.lambda();
  const double a = params.alpha;
  const int nkp = 3 * (o.k + 1);

  // displacement test rows: a_h(u, v) + b_h(v, p_T) = (f, v)
  loc.K.block(o.u, o.u, 2 * o.nk, 2 * o.nk) += A.uu;
  loc.K.block(o.u, o.n_i + o.t_u, 2 * o.nk, o.nut) += A.ut;
  loc.K.block(o.u, o.pT, 2 * o.nk, o.nkm1) += B.q_v.transpose();
  loc.K.block(o.u, o.n_i + o.t_pT, 2 * o.nk, nkp) += B.qbar_v.transpose();
  loc.K.block(o.n_i + o.t_u, o.u, o.nut, 2 * o.nk) += A.ut.transpose();
  loc.K.block(o.n_i + o.t_u, o.n_i + o.t_u, o.nut, o.nut) += A.tt;
  loc.K.block(o.n_i + o.t_u, o.n_i + o.t_pT, o.nut, nkp) += B.qbar_vbar.transpose();

  // total-pressure test rows: b_h(u, q_T) + lam^{-1} (alpha p - p_T, q_T) = 0
  loc.K.block(o.pT, o.u, o.nkm1, 2 * o.nk) += B.q_v;
  loc.K.block(o.pT, o.pT, o.nkm1, o.nkm1) -= lam_inv * M;
  loc.K.block(o.pT, o.p, o.nkm1, o.nkm1) += lam_inv * a * M;
  loc.K.block(o.n_i + o.t_pT, o.u, nkp, 2 * o.nk) += B.qbar_v;
  loc.K.block(o.n_i + o.t_pT, o.n_i + o.t_u, nkp, o.nut) += B.qbar_vbar;

  // velocity test rows: (kappa^{-1} z, w) + b_h((w, 0), p) = 0
  loc.K.block(o.z, o.z, 2 * o.nk, 2 * o.nk) += Mz / params.kappa;
  loc.K.block(o.z, o.p, 2 * o.nk, o.nkm1) += B.q_v.transpose();
  loc.K.block(o.z, o.n_i + o.t_p, 2 * o.nk, nkp) += B.qbar_v.transpose();

  // storage test rows:
  //   w_new (c0 p + lam^{-1} alpha (alpha p - p_T), q) - b_h((z, 0), q) = ...
  loc.K.block(o.p, o.p, o.nkm1, o.nkm1) += w.w_new * (params.c0 + lam_inv * a * a) * M;
  loc.K.block(o.p, o.pT, o.nkm1, o.nkm1) -= w.w_new * lam_inv * a * M;
  loc.K.block(o.p, o.z, o.nkm1, 2 * o.nk) -= B.q_v;
  loc.K.block(o.n_i + o.t_p, o.z, nkp, 2 * o.nk) -= B.qbar_v;

  return loc;
}

// Raw local right-hand side (loads, history, natural boundary data), before
// elimination of the prescribed trace values.
Eigen::VectorXd build_local_rhs(const Mesh& mesh, const DofLayout& layout,
                                const ModelParams& params, SchemeWeights w,
                                const ReferenceTables& tab, int cell,
                                const LocalOffsets& o, const CellTraceU& tru,
                                const ProblemData& data, double t,
                                const SolutionState* prev, const SolutionState* prev2) {
  const ElementContext ctx = build_element_context(mesh, tab, cell);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(o.n_i + o.n_t);

  if (data.body_force) {
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const Eigen::Vector2d f = data.body_force(ctx.xq.row(q).transpose(), t);
      for (int i = 0; i < o.nk; ++i) {
        r(o.u + i) += ctx.wq(q) * f(0) * tab.vk(q, i);
        r(o.u + o.nk + i) += ctx.wq(q) * f(1) * tab.vk(q, i);
      }
    }
  }
  if (data.source) {
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const double g = data.source(ctx.xq.row(q).transpose(), t);
      for (int i = 0; i < o.nkm1; ++i) r(o.p + i) += ctx.wq(q) * g * tab.vkm1(q, i);
    }
  }
  if (w.uses_history()) {
    POROHDG_REQUIRE(prev != nullptr,
                    "solve_step: scheme carries history but no previous state given");
    const Eigen::MatrixXd M = scalar_mass_local(ctx);
    const double lam_inv = 1.0 / params.lambda();
    const double a = params.alpha;
    auto add_history = [&](const SolutionState& s, double weight) {
      const auto pc = s.p.segment(layout.cell_p_offset(cell), o.nkm1);
      const auto pTc = s.pT.segment(layout.cell_p_offset(cell), o.nkm1);
      r.segment(o.p, o.nkm1) +=
          weight * (M * ((params.c0 + lam_inv * a * a) * pc - lam_inv * a * pTc));
    };
    add_history(*prev, w.w_prev);
    if (w.w_prev2 != 0.0) {
      POROHDG_REQUIRE(prev2 != nullptr,
                      "solve_step: two-level scheme needs two previous states");
      add_history(*prev2, w.w_prev2);
    }
  }

  for (int e = 0; e < 3; ++e) {
    const auto& ed = ctx.edge[e];
    if (ed.dtag == DispTag::traction && data.traction_bc) {
      for (int q = 0; q < ed.w.size(); ++q) {
        const Eigen::Vector2d tr =
            data.traction_bc(ed.xq.row(q).transpose(), ed.normal, t);
        for (int m = 0; m <= o.k; ++m) {
          const double tm = tab.trace_u(q, m);
          r(o.n_i + o.t_u + tru.slots[e][m * 2 + 0]) += ed.w(q) * tr(0) * tm;
          r(o.n_i + o.t_u + tru.slots[e][m * 2 + 1]) += ed.w(q) * tr(1) * tm;
        }
      }
    }
    if (ed.ftag == FlowTag::flux && data.normal_flux_bc) {
      for (int q = 0; q < ed.w.size(); ++q) {
        const double s = data.normal_flux_bc(ed.xq.row(q).transpose(), ed.normal, t);
        for (int m = 0; m <= o.k; ++m)
          r(o.n_i + o.t_p + e * (o.k + 1) + m) -= ed.w(q) * s * tab.facet_modal(q, m);
      }
    }
  }
  return r;
}

// trace descriptor: field 0 = ubar, 1 = pTbar, 2 = pbar
struct TraceDof {
  int field;
  int index;      // index within the field's coefficient vector
  int condensed;  // global facet-system index, -1 when constrained
};

std::vector<TraceDof> local_trace_dofs(const Mesh& mesh, const DofLayout& layout,
                                       int cell, const CellTraceU& tru,
                                       const LocalOffsets& o) {
  std::vector<TraceDof> out(o.n_t);
  for (int s = 0; s < o.nut; ++s) {
    const int d = tru.dofs[s];
    out[s] = {0, d, layout.ubar_condensed[d]};
  }
  for (int e = 0; e < 3; ++e) {
    for (int m = 0; m <= o.k; ++m) {
      const int d = layout.facet_scalar_dof(mesh.cell_facets[cell][e], m);
      out[o.t_pT + e * (o.k + 1) + m] = {1, d, layout.pTbar_condensed(d)};
      out[o.t_p + e * (o.k + 1) + m] = {2, d, layout.pbar_condensed[d]};
    }
  }
  return out;
}

double trace_value(const TraceDof& td, const Eigen::VectorXd& ubar_values,
                   const Eigen::VectorXd& pbar_values) {
  return td.field == 0 ? ubar_values(td.index) : pbar_values(td.index);
}

// Two-sided equilibration (inf norms, a few sweeps). The Schur complement is
// invariant under any diagonal scaling of the interior block applied this
// way, so this only improves the factorization.
void ruiz_equilibrate(Eigen::MatrixXd& A, Eigen::VectorXd& dr, Eigen::VectorXd& dc) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  dr = Eigen::VectorXd::Ones(m);
  dc = Eigen::VectorXd::Ones(n);
  for (int iter = 0; iter < 3; ++iter) {
    for (int i = 0; i < m; ++i) {
      const double s = A.row(i).cwiseAbs().maxCoeff();
      if (s > 0.0) {
        const double f = 1.0 / std::sqrt(s);
        A.row(i) *= f;
        dr(i) *= f;
      }
    }
    for (int j = 0; j < n; ++j) {
      const double s = A.col(j).cwiseAbs().maxCoeff();
      if (s > 0.0) {
        const double f = 1.0 / std::sqrt(s);
        A.col(j) *= f;
        dc(j) *= f;
      }
    }
  }
}

void write_trace_fields(const DofLayout& layout, const Eigen::VectorXd& xf,
                        const Eigen::VectorXd& ubar_values,
                        const Eigen::VectorXd& pbar_values, SolutionState& s) {
  for (int d = 0; d < layout.u_trace_size(); ++d)
    s.ubar(d) = layout.ubar_constrained[d] ? ubar_values(d) : xf(layout.ubar_condensed[d]);
  for (int d = 0; d < layout.facet_scalar_size(); ++d) {
    s.pTbar(d) = xf(layout.pTbar_condensed(d));
    s.pbar(d) = layout.pbar_constrained[d] ? pbar_values(d) : xf(layout.pbar_condensed[d]);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ScaledSparseLU
// ---------------------------------------------------------------------------

void ScaledSparseLU::compute(const Eigen::SparseMatrix<double>& A) {
  A_ = A;
  A_.makeCompressed();
  const int m = static_cast<int>(A_.rows());
  const int n = static_cast<int>(A_.cols());
  dr_ = Eigen::VectorXd::Ones(m);
  dc_ = Eigen::VectorXd::Ones(n);
  As_ = A_;
  Eigen::VectorXd rmax(m), cmax(n);
  for (int iter = 0; iter < 3; ++iter) {
    rmax.setZero();
    cmax.setZero();
    for (int j = 0; j < As_.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(As_, j); it; ++it) {
        const double v = std::abs(it.value());
        rmax(it.row()) = std::max(rmax(it.row()), v);
        cmax(it.col()) = std::max(cmax(it.col()), v);
      }
    }
    for (int i = 0; i < m; ++i)
      if (rmax(i) > 0.0) dr_(i) /= std::sqrt(rmax(i));
    for (int j = 0; j < n; ++j)
      if (cmax(j) > 0.0) dc_(j) /= std::sqrt(cmax(j));
    As_ = dr_.asDiagonal() * A_ * dc_.asDiagonal();
  }
  scale_ = 0.0;
  for (int j = 0; j < A_.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, j); it; ++it)
      scale_ = std::max(scale_, std::abs(it.value()));
  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(As_);
  POROHDG_CHECK(lu_->info() == Eigen::Success,
                "ScaledSparseLU: factorization failed (singular matrix?)");
}

Eigen::VectorXd ScaledSparseLU::solve(const Eigen::VectorXd& b,
                                      double* rel_residual) const {
  if (b.lpNorm<Eigen::Infinity>() == 0.0) {
    if (rel_residual) *rel_residual = 0.0;
    return Eigen::VectorXd::Zero(A_.cols());
  }
  Eigen::VectorXd x = dc_.asDiagonal() * lu_->solve((dr_.asDiagonal() * b).eval());
  double rel = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    const Eigen::VectorXd r = b - A_ * x;
    const double denom = b.norm() + scale_ * x.norm();
    rel = denom > 0.0 ? r.norm() / denom : r.norm();
    if (rel < 1e-14) break;
    x += dc_.asDiagonal() * lu_->solve((dr_.asDiagonal() * r).eval());
  }
  if (rel_residual) *rel_residual = rel;
  return x;
}

// ---------------------------------------------------------------------------
// CondensedSystem
// ---------------------------------------------------------------------------

struct CondensedSystem::ElementOp {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // factors the equilibrated K_ii
  Eigen::VectorXd dr, dc;
  Eigen::MatrixXd K_if_free, K_fi_free;  // interior <-> free trace couplings
  Eigen::MatrixXd K_if_con;              // interior rows of constrained columns
  Eigen::MatrixXd K_ff_free_con;         // free trace rows of constrained columns
  std::vector<int> free_cond;            // condensed index per free local trace dof
  std::vector<int> free_local;
  std::vector<TraceDof> con;
  CellTraceU tru;
  LocalOffsets off;

  Eigen::VectorXd interior_solve(const Eigen::VectorXd& b) const {
    return dc.asDiagonal() * lu.solve((dr.asDiagonal() * b).eval());
  }
};

CondensedSystem::CondensedSystem(CondensedSystem&&) noexcept = default;
CondensedSystem& CondensedSystem::operator=(CondensedSystem&&) noexcept = default;
CondensedSystem::~CondensedSystem() = default;

CondensedSystem::CondensedSystem(const Mesh& mesh, const DofLayout& layout,
                                 const ModelParams& params, SchemeWeights weights)
    : mesh_(&mesh),
      layout_(&layout),
      params_(params),
      weights_(weights),
      tables_(layout) {
  params_.validate();
  POROHDG_REQUIRE(weights.w_new > 0.0, "CondensedSystem: scheme weight must be positive");
  POROHDG_REQUIRE(mesh.measure_disp(DispTag::dirichlet) > 0.0,
                  "CondensedSystem: the displacement boundary part is empty; rigid "
                  "modes would make the facet system singular");

  std::vector<Eigen::Triplet<double>> trip;
  elems_.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    LocalSystem loc = build_local_system(mesh, layout, params_, weights_, tables_, c);
    const auto& o = loc.off;
    const auto trace = local_trace_dofs(mesh, layout, c, loc.tru, o);

    ElementOp op;
    op.tru = std::move(loc.tru);
    op.off = o;
    std::vector<int> con_local;
    for (int s = 0; s < o.n_t; ++s) {
      if (trace[s].condensed >= 0) {
        op.free_cond.push_back(trace[s].condensed);
        op.free_local.push_back(s);
      } else {
        op.con.push_back(trace[s]);
        con_local.push_back(s);
      }
    }
    const int nf = static_cast<int>(op.free_cond.size());
    const int nc = static_cast<int>(op.con.size());

    Eigen::MatrixXd Kii = loc.K.topLeftCorner(o.n_i, o.n_i);
    op.K_if_free.resize(o.n_i, nf);
    op.K_fi_free.resize(nf, o.n_i);
    op.K_if_con.resize(o.n_i, nc);
    op.K_ff_free_con.resize(nf, nc);
    Eigen::MatrixXd K_ff_free(nf, nf);
    for (int s = 0; s < nf; ++s) {
      op.K_if_free.col(s) = loc.K.block(0, o.n_i + op.free_local[s], o.n_i, 1);
      op.K_fi_free.row(s) = loc.K.block(o.n_i + op.free_local[s], 0, 1, o.n_i);
      for (int s2 = 0; s2 < nf; ++s2)
        K_ff_free(s, s2) = loc.K(o.n_i + op.free_local[s], o.n_i + op.free_local[s2]);
      for (int s2 = 0; s2 < nc; ++s2)
        op.K_ff_free_con(s, s2) = loc.K(o.n_i + op.free_local[s], o.n_i + con_local[s2]);
    }
    for (int s = 0; s < nc; ++s)
      op.K_if_con.col(s) = loc.K.col(o.n_i + con_local[s]).head(o.n_i);

    ruiz_equilibrate(Kii, op.dr, op.dc);
    op.lu.compute(Kii);
    {
      const Eigen::VectorXd probe = op.lu.solve(Eigen::VectorXd::Ones(o.n_i));
      POROHDG_CHECK(probe.allFinite(),
                    "CondensedSystem: singular interior block on element " << c);
    }

    // S_loc = K_ff - K_fi K_ii^{-1} K_if restricted to the free trace dofs
    const Eigen::MatrixXd T =
        op.dc.asDiagonal() * op.lu.solve((op.dr.asDiagonal() * op.K_if_free).eval());
    const Eigen::MatrixXd S_loc = K_ff_free - op.K_fi_free * T;
    for (int s = 0; s < nf; ++s)
      for (int s2 = 0; s2 < nf; ++s2)
        trip.emplace_back(op.free_cond[s], op.free_cond[s2], S_loc(s, s2));

    elems_.push_back(std::move(op));
  }

  S_.resize(layout.n_condensed(), layout.n_condensed());
  S_.setFromTriplets(trip.begin(), trip.end());
  lu_.compute(S_);
}

SolutionState CondensedSystem::solve_step(const ProblemData& data, double t_new,
                                          const SolutionState* prev,
                                          const SolutionState* prev2) const {
  const Mesh& mesh = *mesh_;
  const DofLayout& layout = *layout_;

  Eigen::VectorXd ubar_values, pbar_values;
  prescribed_trace_values(mesh, layout, data, t_new, ubar_values, pbar_values);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(layout.n_condensed());
  std::vector<Eigen::VectorXd> r_interior(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementOp& op = elems_[c];
    const auto& o = op.off;
    const Eigen::VectorXd r = build_local_rhs(mesh, layout, params_, weights_, tables_, c,
                                              o, op.tru, data, t_new, prev, prev2);
    Eigen::VectorXd vc(op.con.size());
    for (std::size_t s = 0; s < op.con.size(); ++s)
      vc(s) = trace_value(op.con[s], ubar_values, pbar_values);
    Eigen::VectorXd ri = r.head(o.n_i) - op.K_if_con * vc;
    Eigen::VectorXd rf(op.free_cond.size());
    for (std::size_t s = 0; s < op.free_cond.size(); ++s)
      rf(s) = r(o.n_i + op.free_local[s]);
    rf -= op.K_ff_free_con * vc;
    rf -= op.K_fi_free * op.interior_solve(ri);
    for (std::size_t s = 0; s < op.free_cond.size(); ++s) rhs(op.free_cond[s]) += rf(s);
    r_interior[c] = std::move(ri);
  }

  double rel = 0.0;
  const Eigen::VectorXd xf = lu_.solve(rhs, &rel);
  last_residual_ = rel;
  POROHDG_CHECK(rel <= residual_tolerance,
                "CondensedSystem: facet solve residual " << rel << " exceeds "
                                                         << residual_tolerance);

  SolutionState s = zero_state(layout);
  s.time = t_new;
  write_trace_fields(layout, xf, ubar_values, pbar_values, s);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementOp& op = elems_[c];
    const auto& o = op.off;
    Eigen::VectorXd xloc(op.free_cond.size());
    for (std::size_t j = 0; j < op.free_cond.size(); ++j) xloc(j) = xf(op.free_cond[j]);
    const Eigen::VectorXd xi = op.interior_solve(r_interior[c] - op.K_if_free * xloc);
    s.u.segment(layout.cell_u_offset(c), 2 * o.nk) = xi.segment(o.u, 2 * o.nk);
    s.pT.segment(layout.cell_p_offset(c), o.nkm1) = xi.segment(o.pT, o.nkm1);
    s.z.segment(layout.cell_u_offset(c), 2 * o.nk) = xi.segment(o.z, 2 * o.nk);
    s.p.segment(layout.cell_p_offset(c), o.nkm1) = xi.segment(o.p, o.nkm1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// monolithic oracle
// ---------------------------------------------------------------------------

SolutionState solve_step_monolithic(const Mesh& mesh, const DofLayout& layout,
                                    const ModelParams& params, SchemeWeights weights,
                                    const ProblemData& data, double t_new,
                                    const SolutionState* prev, const SolutionState* prev2,
                                    double* rel_residual) {
  const ReferenceTables tables(layout);
  const int off_u = 0;
  const int off_pT = layout.u_size();
  const int off_z = off_pT + layout.p_size();
  const int off_p = off_z + layout.z_size();
  const int off_tr = off_p + layout.p_size();
  const int n_total = off_tr + layout.n_condensed();

  Eigen::VectorXd ubar_values, pbar_values;
  prescribed_trace_values(mesh, layout, data, t_new, ubar_values, pbar_values);

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_total);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    LocalSystem loc = build_local_system(mesh, layout, params, weights, tables, c);
    const auto& o = loc.off;
    const auto trace = local_trace_dofs(mesh, layout, c, loc.tru, o);
    const Eigen::VectorXd r = build_local_rhs(mesh, layout, params, weights, tables, c, o,
                                              loc.tru, data, t_new, prev, prev2);
    std::vector<int> gidx(o.n_i + o.n_t, -1);
    std::vector<double> gval(o.n_i + o.n_t, 0.0);
    for (int l = 0; l < 2 * o.nk; ++l) gidx[o.u + l] = off_u + layout.cell_u_offset(c) + l;
    for (int l = 0; l < o.nkm1; ++l) gidx[o.pT + l] = off_pT + layout.cell_p_offset(c) + l;
    for (int l = 0; l < 2 * o.nk; ++l) gidx[o.z + l] = off_z + layout.cell_u_offset(c) + l;
    for (int l = 0; l < o.nkm1; ++l) gidx[o.p + l] = off_p + layout.cell_p_offset(c) + l;
    for (int s = 0; s < o.n_t; ++s) {
      if (trace[s].condensed >= 0)
        gidx[o.n_i + s] = off_tr + trace[s].condensed;
      else
        gval[o.n_i + s] = trace_value(trace[s], ubar_values, pbar_values);
    }
    for (int ra = 0; ra < o.n_i + o.n_t; ++ra) {
      if (gidx[ra] < 0) continue;
      rhs(gidx[ra]) += r(ra);
      for (int cb = 0; cb < o.n_i + o.n_t; ++cb) {
        if (loc.K(ra, cb) == 0.0) continue;
        if (gidx[cb] >= 0)
          trip.emplace_back(gidx[ra], gidx[cb], loc.K(ra, cb));
        else
          rhs(gidx[ra]) -= loc.K(ra, cb) * gval[cb];
      }
    }
  }

  Eigen::SparseMatrix<double> A(n_total, n_total);
  A.setFromTriplets(trip.begin(), trip.end());
  ScaledSparseLU lu;
  lu.compute(A);
  double rel = 0.0;
  const Eigen::VectorXd x = lu.solve(rhs, &rel);
  if (rel_residual) *rel_residual = rel;
  POROHDG_CHECK(rel <= CondensedSystem::residual_tolerance,
                "solve_step_monolithic: residual " << rel);

  SolutionState s = zero_state(layout);
  s.time = t_new;
  s.u = x.segment(off_u, layout.u_size());
  s.pT = x.segment(off_pT, layout.p_size());
  s.z = x.segment(off_z, layout.z_size());
  s.p = x.segment(off_p, layout.p_size());
  write_trace_fields(layout, x.segment(off_tr, layout.n_condensed()), ubar_values,
                     pbar_values, s);
  return s;
}

// ---------------------------------------------------------------------------
// conformity and inf-sup diagnostics
// ---------------------------------------------------------------------------

ConformityReport divergence_conformity_report(const Mesh& mesh, const DofLayout& layout,
                                              const SolutionState& state) {
  const ReferenceTables tab(layout);
  const int nq = tab.edge.size();
  const int nk = layout.nk;

  // normal components per facet and side, at the shared facet parameters
  Eigen::MatrixXd un0 = Eigen::MatrixXd::Zero(mesh.n_facets(), nq);
  Eigen::MatrixXd un1 = un0, zn0 = un0, zn1 = un0;

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& kc = mesh.cells[c];
    for (int e = 0; e < 3; ++e) {
      const int f = mesh.cell_facets[c][e];
      const auto ev = cell_edge_vertices(kc, e);
      const auto& et = tab.etab[e][ev[0] < ev[1] ? 0 : 1];
      const Eigen::Vector2d n = mesh.facets[f].normal;  // global facet normal
      const bool side0 = mesh.facets[f].cells[0] == c;
      const int uoff = layout.cell_u_offset(c);
      for (int q = 0; q < nq; ++q) {
        double ux = 0.0, uy = 0.0, zx = 0.0, zy = 0.0;
        for (int i = 0; i < nk; ++i) {
          ux += state.u(uoff + i) * et.vk(q, i);
          uy += state.u(uoff + nk + i) * et.vk(q, i);
          zx += state.z(uoff + i) * et.vk(q, i);
          zy += state.z(uoff + nk + i) * et.vk(q, i);
        }
        (side0 ? un0 : un1)(f, q) = ux * n(0) + uy * n(1);
        (side0 ? zn0 : zn1)(f, q) = zx * n(0) + zy * n(1);
      }
    }
  }

  ConformityReport rep;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const bool interior = !mesh.is_boundary_facet(f);
    for (int q = 0; q < nq; ++q) {
      rep.scale_u_n = std::max(rep.scale_u_n, std::abs(un0(f, q)));
      rep.scale_z_n = std::max(rep.scale_z_n, std::abs(zn0(f, q)));
      if (interior) {
        rep.max_jump_u_n = std::max(rep.max_jump_u_n, std::abs(un0(f, q) - un1(f, q)));
        rep.max_jump_z_n = std::max(rep.max_jump_z_n, std::abs(zn0(f, q) - zn1(f, q)));
      }
    }
    if (mesh.disp_tags[f] == DispTag::traction) {
      const Eigen::Vector2d n = mesh.facets[f].normal;
      for (int q = 0; q < nq; ++q) {
        double bx = 0.0, by = 0.0;
        for (int m = 0; m <= layout.k; ++m) {
          bx += state.ubar(layout.u_trace_dof(f, m, 0)) * tab.trace_u(q, m);
          by += state.ubar(layout.u_trace_dof(f, m, 1)) * tab.trace_u(q, m);
        }
        rep.max_traction_gap_u_n = std::max(
            rep.max_traction_gap_u_n, std::abs(un0(f, q) - (bx * n(0) + by * n(1))));
      }
    }
  }
  return rep;
}

InfSupValues infsup_estimate(const Mesh& mesh, const DofLayout& layout) {
  InfSupValues out;
  {
    const Eigen::MatrixXd B = dense_bh(mesh, layout);
    Eigen::LLT<Eigen::MatrixXd> lv(dense_gram_v(mesh, layout));
    Eigen::LLT<Eigen::MatrixXd> lq(dense_gram_q(mesh, layout, false));
    POROHDG_CHECK(lv.info() == Eigen::Success && lq.info() == Eigen::Success,
                  "infsup_estimate: norm Gram matrices not positive definite "
                  "(is |Gamma_D| > 0?)");
    Eigen::MatrixXd M = lv.matrixL().solve(B);
    M = lq.matrixL().solve(M.transpose()).transpose();
    out.displacement_pressure =
        Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues().minCoeff();
  }
  {
    const Eigen::MatrixXd B = dense_bh_velocity(mesh, layout);
    Eigen::LLT<Eigen::MatrixXd> lw(dense_mass_velocity(mesh, layout));
    Eigen::LLT<Eigen::MatrixXd> lq(dense_gram_q(mesh, layout, true));
    POROHDG_CHECK(lw.info() == Eigen::Success && lq.info() == Eigen::Success,
                  "infsup_estimate: velocity Gram matrices not positive definite");
    Eigen::MatrixXd M = lw.matrixL().solve(B);
    M = lq.matrixL().solve(M.transpose()).transpose();
    out.velocity_pressure =
        Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues().minCoeff();
  }
  return out;
}

}  // namespace porohdg
