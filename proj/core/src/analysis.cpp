// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "porohdg/check.hpp"
#include "porohdg/forms.hpp"
#include "porohdg/timeloop.hpp"

namespace porohdg {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct FieldAccum {
  double e2 = 0.0;  // squared error
  double n2 = 0.0;  // squared exact norm
};

}  // namespace

double z_error_l2(const Mesh& mesh, const DofLayout& layout, const SolutionState& state,
                  const ExactSolution& exact, double t) {
  const ReferenceTables tab(layout, 2 * layout.k + 4, 2 * layout.k + 4);
  double acc = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int off = layout.cell_u_offset(c);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      Eigen::Vector2d zh = Eigen::Vector2d::Zero();
      for (int i = 0; i < layout.nk; ++i) {
        zh(0) += state.z(off + i) * tab.vk(q, i);
        zh(1) += state.z(off + layout.nk + i) * tab.vk(q, i);
      }
      acc += ctx.wq(q) * (zh - exact.z(ctx.xq.row(q).transpose(), t)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

ErrorRecord compute_errors(const Mesh& mesh, const DofLayout& layout,
                           const ModelParams& params, const SolutionState& state,
                           const ExactSolution& exact, double t, double darcy_accum) {
  const ReferenceTables tab(layout, 2 * layout.k + 4, 2 * layout.k + 4);
  ErrorRecord rec;
  rec.cells = mesh.n_cells();
  rec.dofs = layout.total_dofs();
  rec.facet_dofs = layout.n_condensed();
  rec.h = mesh.max_diameter();
  rec.darcy_accum = darcy_accum;

  FieldAccum au, apT, az, ap;
  double mix2 = 0.0;     // || alpha (p - p_h) - (p_T - p_Th) ||^2
  double eps_err2 = 0.0; // || eps(u - u_h) ||^2
  double jump_u2 = 0.0;  // sum_K h^{-1} || u_h - ubar_h ||^2_dK
  double trace_pT2 = 0.0;  // sum_K h || p_T - pTbar_h ||^2_dK

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int uoff = layout.cell_u_offset(c);
    const int poff = layout.cell_p_offset(c);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      const Eigen::Vector2d x = ctx.xq.row(q).transpose();
      const double w = ctx.wq(q);

      Eigen::Vector2d uh = Eigen::Vector2d::Zero(), zh = Eigen::Vector2d::Zero();
      Eigen::Matrix2d gh = Eigen::Matrix2d::Zero();
      for (int i = 0; i < layout.nk; ++i) {
        const double cx = state.u(uoff + i), cy = state.u(uoff + layout.nk + i);
        uh(0) += cx * tab.vk(q, i);
        uh(1) += cy * tab.vk(q, i);
        gh(0, 0) += cx * ctx.gx(q, i);
        gh(0, 1) += cx * ctx.gy(q, i);
        gh(1, 0) += cy * ctx.gx(q, i);
        gh(1, 1) += cy * ctx.gy(q, i);
        zh(0) += state.z(uoff + i) * tab.vk(q, i);
        zh(1) += state.z(uoff + layout.nk + i) * tab.vk(q, i);
      }
      double pTh = 0.0, ph = 0.0;
      for (int i = 0; i < layout.nkm1; ++i) {
        pTh += state.pT(poff + i) * tab.vkm1(q, i);
        ph += state.p(poff + i) * tab.vkm1(q, i);
      }

      const Eigen::Vector2d ue = exact.u(x, t);
      const Eigen::Vector2d ze = exact.z(x, t);
      const double pe = exact.p(x, t);
      const double pTe = exact.p_T(x, t);
      au.e2 += w * (uh - ue).squaredNorm();
      au.n2 += w * ue.squaredNorm();
      az.e2 += w * (zh - ze).squaredNorm();
      az.n2 += w * ze.squaredNorm();
      ap.e2 += w * (ph - pe) * (ph - pe);
      ap.n2 += w * pe * pe;
      apT.e2 += w * (pTh - pTe) * (pTh - pTe);
      apT.n2 += w * pTe * pTe;
      const double mix = params.alpha * (pe - ph) - (pTe - pTh);
      mix2 += w * mix * mix;

      const Eigen::Matrix2d ge = exact.grad_u(x, t);
      const Eigen::Matrix2d de = 0.5 * ((ge - gh) + (ge - gh).transpose());
      eps_err2 += w * (de(0, 0) * de(0, 0) + de(1, 1) * de(1, 1) +
                       2.0 * de(0, 1) * de(0, 1));
    }

    for (int e = 0; e < 3; ++e) {
      const auto& ed = ctx.edge[e];
      for (int q = 0; q < ed.w.size(); ++q) {
        const Eigen::Vector2d x = ed.xq.row(q).transpose();
        // the trace part of |||u - u_h|||_v reduces to the computable jump
        // u_h - ubar_h (the exact element and trace values cancel)
        double dx = 0.0, dy = 0.0;
        for (int i = 0; i < layout.nk; ++i) {
          dx += state.u(uoff + i) * ed.et->vk(q, i);
          dy += state.u(uoff + layout.nk + i) * ed.et->vk(q, i);
        }
        for (int m = 0; m <= layout.k; ++m) {
          const double tm = tab.trace_u(q, m);
          dx -= state.ubar(layout.u_trace_dof(ed.facet, m, 0)) * tm;
          dy -= state.ubar(layout.u_trace_dof(ed.facet, m, 1)) * tm;
        }
        jump_u2 += ed.w(q) / ctx.h * (dx * dx + dy * dy);

        double pTb = 0.0;
        for (int m = 0; m <= layout.k; ++m)
          pTb += state.pTbar(layout.facet_scalar_dof(ed.facet, m)) * tab.facet_modal(q, m);
        const double d = exact.p_T(x, t) - pTb;
        trace_pT2 += ctx.h * ed.w(q) * d * d;
      }
    }
  }

  rec.e_u = std::sqrt(au.e2);
  rec.e_pT = std::sqrt(apT.e2);
  rec.e_z = std::sqrt(az.e2);
  rec.e_p = std::sqrt(ap.e2);
  rec.n_u = std::sqrt(au.n2);
  rec.n_pT = std::sqrt(apT.n2);
  rec.n_z = std::sqrt(az.n2);
  rec.n_p = std::sqrt(ap.n2);
  rec.e_u_v = std::sqrt(eps_err2 + jump_u2);
  rec.e_pT_q = std::sqrt(apT.e2 + trace_pT2);
  rec.composite = std::sqrt(params.c0) * rec.e_p +
                  std::sqrt(mix2 / params.lambda()) +
                  std::sqrt(params.mu()) * rec.e_u_v +
                  std::sqrt(darcy_accum / params.kappa);
  return rec;
}

namespace {

double rate_or_nan(double coarse, double fine, double exact_scale) {
  const double floor = 1e-10 * (exact_scale > 0.0 ? exact_scale : 1.0);
  if (coarse < floor && fine < floor) return nan;  // at rounding level
  if (coarse <= 0.0 || fine <= 0.0) return nan;
  return std::log2(coarse / fine);
}

void append_rate(std::string& line, double r) {
  char buf[32];
  if (std::isnan(r)) {
    line += ",";
  } else {
    std::snprintf(buf, sizeof buf, ",%.3f", r);
    line += buf;
  }
}

}  // namespace

std::string RateTable::csv() const {
  std::string out = "cells,dofs,h,e_u,r_u,e_pT,r_pT,e_z,r_z,e_p,r_p\n";
  char buf[128];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::snprintf(buf, sizeof buf, "%d,%lld,%.6e", r.cells, r.dofs, r.h);
    std::string line = buf;
    const double* errs[4] = {&r.e_u, &r.e_pT, &r.e_z, &r.e_p};
    for (int f = 0; f < 4; ++f) {
      std::snprintf(buf, sizeof buf, ",%.6e", *errs[f]);
      line += buf;
      append_rate(line, rates[i][f]);
    }
    out += line + "\n";
  }
  return out;
}

std::string RateTable::text() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%8s %10s %10s  %-9s %5s  %-9s %5s  %-9s %5s  %-9s %5s\n",
                "cells", "dofs", "facet", "e_u", "r", "e_pT", "r", "e_z", "r", "e_p", "r");
  os << buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto fmt_rate = [](double x, char* b, std::size_t n) {
      if (std::isnan(x))
        std::snprintf(b, n, "%5s", "-");
      else
        std::snprintf(b, n, "%5.2f", x);
    };
    char ru[8], rpT[8], rz[8], rp[8];
    fmt_rate(rates[i][0], ru, sizeof ru);
    fmt_rate(rates[i][1], rpT, sizeof rpT);
    fmt_rate(rates[i][2], rz, sizeof rz);
    fmt_rate(rates[i][3], rp, sizeof rp);
    std::snprintf(buf, sizeof buf,
                  "%8d %10lld %10lld  %.3e %s  %.3e %s  %.3e %s  %.3e %s\n", r.cells,
                  r.dofs, r.facet_dofs, r.e_u, ru, r.e_pT, rpT, r.e_z, rz, r.e_p, rp);
    os << buf;
  }
  return os.str();
}

RateTable convergence_study(const BenchmarkCase& bc, Variant variant, int k,
                            const StudyOptions& opts) {
  POROHDG_REQUIRE(opts.n_levels >= 2, "convergence_study: need at least 2 levels");
  POROHDG_REQUIRE(bc.exact.has_value(),
                  "convergence_study: case '" << bc.name << "' has no exact solution");
  ModelParams params = bc.params;
  params.k = k;
  params.validate();

  RateTable table;
  for (int level = 0; level < opts.n_levels; ++level) {
    const Mesh mesh = bc.mesh_at_level(opts.level_offset + level);
    const DofLayout layout = build_layout(mesh, k, variant);
    ErrorRecord rec;
    if (bc.is_static) {
      const CondensedSystem sys(mesh, layout, params, SchemeWeights::static_problem());
      const SolutionState state = sys.solve_step(bc.data, 0.0);
      rec = compute_errors(mesh, layout, params, state, *bc.exact, 0.0);
    } else {
      TimeGrid grid = bc.grid;
      if (opts.t_final > 0.0) grid.t_final = opts.t_final;
      if (opts.dt > 0.0)
        grid.n_steps = std::max(1, static_cast<int>(std::llround(grid.t_final / opts.dt)));
      const SolutionState init = initialize(mesh, layout, params, &*bc.exact);
      double darcy = 0.0;
      const double dt = grid.dt();
      std::vector<Observer> obs;
      obs.push_back([&](int step, const SolutionState& s) {
        if (step == 0) return;
        const double e = z_error_l2(mesh, layout, s, *bc.exact, grid.t(step));
        darcy += dt * e * e;
      });
      const SolutionState last =
          run(mesh, layout, params, grid, bc.scheme, bc.data, init, obs);
      rec = compute_errors(mesh, layout, params, last, *bc.exact, grid.t_final, darcy);
    }
    table.rows.push_back(rec);
  }

  table.rates.assign(table.rows.size(), {nan, nan, nan, nan});
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& c = table.rows[i - 1];
    const auto& f = table.rows[i];
    table.rates[i][0] = rate_or_nan(c.e_u, f.e_u, f.n_u);
    table.rates[i][1] = rate_or_nan(c.e_pT, f.e_pT, f.n_pT);
    table.rates[i][2] = rate_or_nan(c.e_z, f.e_z, f.n_z);
    table.rates[i][3] = rate_or_nan(c.e_p, f.e_p, f.n_p);
  }
  return table;
}

RobustnessReport robustness_compare(const std::vector<std::pair<double, double>>& E_nu,
                                    Variant variant, int k, int level) {
  POROHDG_REQUIRE(!E_nu.empty(), "robustness_compare: empty parameter grid");
  RobustnessReport rep;
  double lo[4], hi[4];
  for (int f = 0; f < 4; ++f) {
    lo[f] = std::numeric_limits<double>::infinity();
    hi[f] = 0.0;
  }
  for (const auto& [E, nu] : E_nu) {
    BenchmarkCase bc = static_case(E, nu);
    ModelParams params = bc.params;
    params.k = k;
    const Mesh mesh = bc.mesh_at_level(level);
    const DofLayout layout = build_layout(mesh, k, variant);
    const CondensedSystem sys(mesh, layout, params, SchemeWeights::static_problem());
    const SolutionState state = sys.solve_step(bc.data, 0.0);
    const ErrorRecord rec = compute_errors(mesh, layout, params, state, *bc.exact, 0.0);
    rep.runs.push_back({E, nu, rec});
    const double errs[4] = {rec.e_u, rec.e_pT, rec.e_z, rec.e_p};
    for (int f = 0; f < 4; ++f) {
      lo[f] = std::min(lo[f], errs[f]);
      hi[f] = std::max(hi[f], errs[f]);
    }
  }
  rep.ratio_u = hi[0] / lo[0];
  rep.ratio_pT = hi[1] / lo[1];
  rep.ratio_z = hi[2] / lo[2];
  rep.ratio_p = hi[3] / lo[3];
  return rep;
}

double energy_x(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                const SolutionState& state) {
  const ReferenceTables tab(layout);
  const double ah = ah_energy(mesh, layout, params, tab, state.u, state.ubar);
  double mix2 = 0.0, p2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int poff = layout.cell_p_offset(c);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      double pTh = 0.0, ph = 0.0;
      for (int i = 0; i < layout.nkm1; ++i) {
        pTh += state.pT(poff + i) * tab.vkm1(q, i);
        ph += state.p(poff + i) * tab.vkm1(q, i);
      }
      const double mix = pTh - params.alpha * ph;
      mix2 += ctx.wq(q) * mix * mix;
      p2 += ctx.wq(q) * ph * ph;
    }
  }
  return std::sqrt(std::max(0.0, ah) + mix2 / params.lambda() + params.c0 * p2);
}

double energy_y(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                const SolutionState& state) {
  const ReferenceTables tab(layout);
  double z2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementContext ctx = build_element_context(mesh, tab, c);
    const int off = layout.cell_u_offset(c);
    for (int q = 0; q < ctx.wq.size(); ++q) {
      double zx = 0.0, zy = 0.0;
      for (int i = 0; i < layout.nk; ++i) {
        zx += state.z(off + i) * tab.vk(q, i);
        zy += state.z(off + layout.nk + i) * tab.vk(q, i);
      }
      z2 += ctx.wq(q) * (zx * zx + zy * zy);
    }
  }
  return std::sqrt(z2 / params.kappa);
}

}  // namespace porohdg
