// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/timeloop.hpp"

#include <optional>

#include "porohdg/check.hpp"
#include "porohdg/forms.hpp"

namespace porohdg {

void elliptic_projection(const Mesh& mesh, const DofLayout& layout,
                         const ModelParams& params,
                         const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& u_fn,
                         const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& grad_u_fn,
                         Eigen::VectorXd& u, Eigen::VectorXd& ubar) {
  const ReferenceTables tab(layout, 2 * layout.k + 4, 2 * layout.k + 4);
  const double two_mu = 2.0 * params.mu();
  const int nk = layout.nk;

  Eigen::VectorXd ubar_values = Eigen::VectorXd::Zero(layout.u_trace_size());
  project_u_trace(
      mesh, layout, u_fn,
      [&](int f) { return mesh.disp_tags[f] == DispTag::dirichlet; }, ubar_values);

  const int n = layout.u_size() + layout.n_ubar_free;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const CellTraceU tr = build_cell_trace_u(mesh, layout, c);
    const LocalAh A = assemble_ah_local(ctx, params, tr);
    const int off = layout.cell_u_offset(c);

    // global u-pair indices: [element u | free ubar], -1 when constrained
    std::vector<int> tg(tr.size());
    std::vector<double> tval(tr.size(), 0.0);
    for (int s = 0; s < tr.size(); ++s) {
      const int cond = layout.ubar_condensed[tr.dofs[s]];
      tg[s] = cond < 0 ? -1 : layout.u_size() + cond;
      if (cond < 0) tval[s] = ubar_values(tr.dofs[s]);
    }

    // local right-hand side: a_h((u, u), v) has a vanishing jump, leaving the
    // strain term and the single consistency term with the exact strain
    Eigen::VectorXd re = Eigen::VectorXd::Zero(2 * nk);
    Eigen::VectorXd rt = Eigen::VectorXd::Zero(tr.size());
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const Eigen::Matrix2d g = grad_u_fn(ctx.xq.row(q).transpose());
      const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
      const double w = two_mu * ctx.wq(q);
      for (int i = 0; i < nk; ++i) {
        const double gxi = ctx.gx(q, i), gyi = ctx.gy(q, i);
        // eps_exact : eps(phi_i e_c)
        re(i) += w * (eps(0, 0) * gxi + eps(0, 1) * gyi);
        re(nk + i) += w * (eps(1, 0) * gxi + eps(1, 1) * gyi);
      }
    }
    for (int e = 0; e < 3; ++e) {
      const auto& ed = ctx.edge[e];
      for (int q = 0; q < ed.w.size(); ++q) {
        const Eigen::Matrix2d g = grad_u_fn(ed.xq.row(q).transpose());
        const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
        const Eigen::Vector2d sn = two_mu * (eps * ed.normal);
        const double w = ed.w(q);
        for (int i = 0; i < nk; ++i) {
          re(i) -= w * sn(0) * ed.et->vk(q, i);
          re(nk + i) -= w * sn(1) * ed.et->vk(q, i);
        }
        for (int m = 0; m <= layout.k; ++m) {
          const double tm = ctx.tab->trace_u(q, m);
          rt(tr.slots[e][m * 2 + 0]) += w * sn(0) * tm;
          rt(tr.slots[e][m * 2 + 1]) += w * sn(1) * tm;
        }
      }
    }

    for (int i = 0; i < 2 * nk; ++i) {
      rhs(off + i) += re(i);
      for (int j = 0; j < 2 * nk; ++j)
        if (A.uu(i, j) != 0.0) trip.emplace_back(off + i, off + j, A.uu(i, j));
      for (int s = 0; s < tr.size(); ++s) {
        if (A.ut(i, s) == 0.0) continue;
        if (tg[s] >= 0) {
          trip.emplace_back(off + i, tg[s], A.ut(i, s));
          trip.emplace_back(tg[s], off + i, A.ut(i, s));
        } else {
          rhs(off + i) -= A.ut(i, s) * tval[s];
        }
      }
    }
    for (int s = 0; s < tr.size(); ++s) {
      if (tg[s] < 0) continue;
      rhs(tg[s]) += rt(s);
      for (int s2 = 0; s2 < tr.size(); ++s2) {
        if (A.tt(s, s2) == 0.0) continue;
        if (tg[s2] >= 0)
          trip.emplace_back(tg[s], tg[s2], A.tt(s, s2));
        else
          rhs(tg[s]) -= A.tt(s, s2) * tval[s2];
      }
    }
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  ScaledSparseLU lu;
  lu.compute(A);
  double rel = 0.0;
  const Eigen::VectorXd x = lu.solve(rhs, &rel);
  POROHDG_CHECK(rel <= 1e-10, "elliptic_projection: solve residual " << rel);

  u = x.head(layout.u_size());
  ubar = Eigen::VectorXd::Zero(layout.u_trace_size());
  for (int d = 0; d < layout.u_trace_size(); ++d)
    ubar(d) = layout.ubar_constrained[d] ? ubar_values(d)
                                         : x(layout.u_size() + layout.ubar_condensed[d]);
}

Eigen::VectorXd l2_project_scalar(const Mesh& mesh, const DofLayout& layout,
                                  const std::function<double(const Eigen::Vector2d&)>& fn) {
  const ReferenceTables tab(layout, 2 * layout.k + 4, 2 * layout.k + 4);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.p_size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.nkm1);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const double f = fn(ctx.xq.row(q).transpose());
      for (int i = 0; i < layout.nkm1; ++i) b(i) += ctx.wq(q) * f * tab.vkm1(q, i);
    }
    const Eigen::MatrixXd M = scalar_mass_local(ctx);
    out.segment(layout.cell_p_offset(c), layout.nkm1) = Eigen::LLT<Eigen::MatrixXd>(M).solve(b);
  }
  return out;
}

Eigen::VectorXd l2_project_vector(const Mesh& mesh, const DofLayout& layout,
                                  const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn) {
  const ReferenceTables tab(layout, 2 * layout.k + 4, 2 * layout.k + 4);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.z_size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(layout.nk), by = bx;
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const Eigen::Vector2d f = fn(ctx.xq.row(q).transpose());
      for (int i = 0; i < layout.nk; ++i) {
        bx(i) += ctx.wq(q) * f(0) * tab.vk(q, i);
        by(i) += ctx.wq(q) * f(1) * tab.vk(q, i);
      }
    }
    const Eigen::MatrixXd M = tab.vk.transpose() * ctx.wq.asDiagonal() * tab.vk;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    out.segment(layout.cell_u_offset(c), layout.nk) = llt.solve(bx);
    out.segment(layout.cell_u_offset(c) + layout.nk, layout.nk) = llt.solve(by);
  }
  return out;
}

SolutionState initialize(const Mesh& mesh, const DofLayout& layout,
                         const ModelParams& params, const ExactSolution* exact) {
  SolutionState s = zero_state(layout);
  if (!exact) return s;
  elliptic_projection(
      mesh, layout, params,
      [&](const Eigen::Vector2d& x) { return exact->u(x, 0.0); },
      [&](const Eigen::Vector2d& x) { return exact->grad_u(x, 0.0); }, s.u, s.ubar);
  s.p = l2_project_scalar(mesh, layout,
                          [&](const Eigen::Vector2d& x) { return exact->p(x, 0.0); });
  s.pT = l2_project_scalar(mesh, layout,
                           [&](const Eigen::Vector2d& x) { return exact->p_T(x, 0.0); });
  s.z = l2_project_vector(mesh, layout,
                          [&](const Eigen::Vector2d& x) { return exact->z(x, 0.0); });
  auto all = [](int) { return true; };
  project_facet_scalar(mesh, layout,
                       [&](const Eigen::Vector2d& x) { return exact->p(x, 0.0); }, all,
                       s.pbar);
  project_facet_scalar(mesh, layout,
                       [&](const Eigen::Vector2d& x) { return exact->p_T(x, 0.0); }, all,
                       s.pTbar);
  s.time = 0.0;
  return s;
}

SolutionState run(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                  const TimeGrid& grid, Scheme scheme, const ProblemData& data,
                  const SolutionState& initial, const std::vector<Observer>& observers,
                  const RunOptions& opts) {
  POROHDG_REQUIRE(grid.n_steps >= 1 && grid.t_final > 0.0, "run: empty time grid");
  POROHDG_REQUIRE(opts.start_step >= 0 && opts.start_step <= grid.n_steps,
                  "run: start step outside the grid");
  POROHDG_REQUIRE(scheme == Scheme::backward_euler || opts.start_step <= 1 ||
                      opts.prev_for_bdf2 != nullptr,
                  "run: resuming a two-level scheme needs the previous state");

  const double dt = grid.dt();
  std::optional<CondensedSystem> be, bdf2;
  auto be_system = [&]() -> const CondensedSystem& {
    if (!be) be.emplace(mesh, layout, params, SchemeWeights::backward_euler(dt));
    return *be;
  };
  auto bdf2_system = [&]() -> const CondensedSystem& {
    if (!bdf2) bdf2.emplace(mesh, layout, params, SchemeWeights::bdf2(dt));
    return *bdf2;
  };

  SolutionState state = initial;
  SolutionState prev2;
  bool has_prev2 = false;
  if (opts.prev_for_bdf2) {
    prev2 = *opts.prev_for_bdf2;
    has_prev2 = true;
  }
  if (opts.start_step == 0)
    for (const auto& obs : observers) obs(0, state);

  for (int n = opts.start_step; n < grid.n_steps; ++n) {
    const double t_new = grid.t(n + 1);
    SolutionState next;
    if (scheme == Scheme::backward_euler || n == 0) {
      next = be_system().solve_step(data, t_new, &state, nullptr);
    } else {
      be.reset();  // the startup factorization is not needed again
      POROHDG_CHECK(has_prev2, "run: missing history for the two-level scheme");
      next = bdf2_system().solve_step(data, t_new, &state, &prev2);
    }
    prev2 = std::move(state);
    has_prev2 = true;
    state = std::move(next);
    for (const auto& obs : observers) obs(n + 1, state);
  }
  return state;
}

}  // namespace porohdg
