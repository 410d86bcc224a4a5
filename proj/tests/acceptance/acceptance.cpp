// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include "commands.hpp"
#include "porohdg/analysis.hpp"
#include "porohdg/basis.hpp"
#include "porohdg/forms.hpp"
#include "porohdg/mms.hpp"
#include "porohdg/quadrature.hpp"
#include "porohdg/system.hpp"
#include "porohdg/timeloop.hpp"
#include "porohdg/vtk.hpp"

using namespace porohdg;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

bool rate_at_least(double rate, double gate) { return !std::isnan(rate) && rate >= gate; }

// ---------------------------------------------------------------------------

// criteria 1 and 2: quasi-static manufactured rates
void criterion_quasistatic(int number, int k, int n_levels,
                           const std::array<double, 4>& gates) {
  BenchmarkCase bc = quasistatic_case();
  StudyOptions opts;
  opts.n_levels = n_levels;
  opts.dt = 1e-3;
  bool ok = true;
  std::string detail;
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const RateTable table = convergence_study(bc, variant, k, opts);
    const auto& r = table.rates.back();
    const bool pass = rate_at_least(r[0], gates[0]) && rate_at_least(r[1], gates[1]) &&
                      rate_at_least(r[2], gates[2]) && rate_at_least(r[3], gates[3]);
    ok = ok && pass;
    detail += fmt("%s r=(%.2f,%.2f,%.2f,%.2f) ",
                  variant == Variant::hdg ? "hdg" : "edg-hdg", r[0], r[1], r[2], r[3]);
  }
  report(number, ok,
         fmt("quasi-static k=%d rates vs gates (u>=%.1f, pT>=%.1f, z>=%.1f, p>=%.1f): %s",
             k, gates[0], gates[1], gates[2], gates[3], detail.c_str()));
}

void criterion_static_robustness() {
  bool ok = true;
  std::string note;
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    for (int k : {1, 3}) {
      const int offset = k == 1 ? 2 : 0;  // meshes 16..64 per side for k=1, 4..16 for k=3
      for (double E : {1.0, 1e4}) {
        std::array<RateTable, 2> tables;
        int idx = 0;
        for (double nu : {0.4, 0.49999}) {
          BenchmarkCase bc = static_case(E, nu);
          StudyOptions opts;
          opts.n_levels = 3;
          opts.level_offset = offset;
          tables[idx++] = convergence_study(bc, variant, k, opts);
        }
        const double targets[4] = {double(k + 1), double(k), double(k + 1), double(k)};
        for (const auto& table : tables) {
          const auto& r = table.rates.back();
          for (int f = 0; f < 4; ++f) {
            if (std::isnan(r[f]) || std::abs(r[f] - targets[f]) > 0.25) {
              ok = false;
              note += fmt("[%s k=%d E=%.0e field %d rate %.2f target %.0f] ",
                          variant == Variant::hdg ? "hdg" : "edg-hdg", k, E, f, r[f],
                          targets[f]);
            }
          }
        }
        // error ratio across nu at the finest level
        const ErrorRecord& a = tables[0].rows.back();
        const ErrorRecord& b = tables[1].rows.back();
        const double ratios[4] = {
            std::max(a.e_u, b.e_u) / std::min(a.e_u, b.e_u),
            std::max(a.e_pT, b.e_pT) / std::min(a.e_pT, b.e_pT),
            std::max(a.e_z, b.e_z) / std::min(a.e_z, b.e_z),
            std::max(a.e_p, b.e_p) / std::min(a.e_p, b.e_p)};
        for (int f = 0; f < 4; ++f) {
          if (!(ratios[f] <= 3.0)) {
            ok = false;
            note += fmt("[%s k=%d E=%.0e field %d nu-ratio %.2f] ",
                        variant == Variant::hdg ? "hdg" : "edg-hdg", k, E, f, ratios[f]);
          }
        }
      }
    }
  }
  report(3, ok,
         "static rates within 0.25 of (k+1, k, k+1, k) and nu-robust error "
         "ratios <= 3 across the incompressible limit " +
             (note.empty() ? std::string("(all configurations)") : note));
}

ProblemData random_poly_data(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double a0 = unif(rng), a1 = unif(rng), a2 = unif(rng), a3 = unif(rng);
  const double b0 = unif(rng), b1 = unif(rng), b2 = unif(rng);
  const double c0 = unif(rng), c1 = unif(rng), c2 = unif(rng), c3 = unif(rng);
  const double d0 = unif(rng), d1 = unif(rng);
  ProblemData data;
  data.body_force = [=](const Eigen::Vector2d& x, double) -> Eigen::Vector2d {
    return {a0 + a1 * x(0) + a2 * x(1), a3 + a1 * x(1)};
  };
  data.source = [=](const Eigen::Vector2d& x, double) {
    return b0 + b1 * x(0) + b2 * x(1);
  };
  data.displacement_bc = [=](const Eigen::Vector2d& x, double) -> Eigen::Vector2d {
    return {c0 + c1 * x(1), c2 + c3 * x(0)};
  };
  data.pressure_bc = [=](const Eigen::Vector2d& x, double) { return d0 + d1 * x(0); };
  data.traction_bc = [=](const Eigen::Vector2d& x, const Eigen::Vector2d&,
                         double) -> Eigen::Vector2d {
    return {b1 + c1 * x(1), d1 + a2 * x(1)};
  };
  data.normal_flux_bc = [=](const Eigen::Vector2d& x, const Eigen::Vector2d&, double) {
    return c2 + b2 * x(1);
  };
  return data;
}

void criterion_condensation_oracle() {
  BenchmarkCase qs = quasistatic_case();
  double worst = 0.0;
  int combo = 0;
  for (int n : {1, 2}) {
    for (int k : {1, 2}) {
      for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
        const Mesh mesh = qs.mesh_at_size(n, n);
        ModelParams params = qs.params;
        params.k = k;
        const DofLayout layout = build_layout(mesh, k, variant);
        const SchemeWeights w = SchemeWeights::backward_euler(0.05);
        const ProblemData data = random_poly_data(500 + combo);
        std::mt19937_64 rng(900 + combo);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        SolutionState hist = zero_state(layout);
        for (Eigen::Index i = 0; i < hist.p.size(); ++i) hist.p(i) = unif(rng);
        for (Eigen::Index i = 0; i < hist.pT.size(); ++i) hist.pT(i) = unif(rng);

        const CondensedSystem sys(mesh, layout, params, w);
        const SolutionState a = sys.solve_step(data, 0.05, &hist);
        const SolutionState b =
            solve_step_monolithic(mesh, layout, params, w, data, 0.05, &hist);
        double num = 0.0, den = 0.0;
        for (auto pair : {std::make_pair(&a.u, &b.u), std::make_pair(&a.pT, &b.pT),
                          std::make_pair(&a.z, &b.z), std::make_pair(&a.p, &b.p),
                          std::make_pair(&a.ubar, &b.ubar),
                          std::make_pair(&a.pTbar, &b.pTbar),
                          std::make_pair(&a.pbar, &b.pbar)}) {
          num += (*pair.first - *pair.second).squaredNorm();
          den += pair.second->squaredNorm();
        }
        worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-30));
        ++combo;
      }
    }
  }
  report(4, worst <= 1e-10,
         fmt("condensed vs monolithic solve on 2/8-cell meshes, k in {1,2}, both "
             "variants, random data: max relative gap %.2e (tol 1e-10)",
             worst));
}

void criterion_zero_data() {
  BenchmarkCase qs = quasistatic_case();
  const Mesh mesh = qs.mesh_at_size(2, 2);
  double worst = 0.0;
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    ModelParams params = qs.params;
    params.k = 1;
    const DofLayout layout = build_layout(mesh, 1, variant);
    const CondensedSystem sys(mesh, layout, params, SchemeWeights::backward_euler(0.01));
    const SolutionState hist = zero_state(layout);
    const SolutionState s = sys.solve_step(ProblemData{}, 0.01, &hist);
    for (const auto* v : {&s.u, &s.pT, &s.z, &s.p, &s.ubar, &s.pTbar, &s.pbar})
      worst = std::max(worst, v->lpNorm<Eigen::Infinity>());
  }
  report(5, worst <= 1e-12,
         fmt("zero loads/BCs/history give the zero state: max |coefficient| %.2e "
             "(tol 1e-12 x matrix scale)",
             worst));
}

void criterion_conformity() {
  BenchmarkCase qs = quasistatic_case();
  double worst = 0.0;
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const Mesh mesh = qs.mesh_at_level(1);
    ModelParams params = qs.params;
    params.k = 1;
    const DofLayout layout = build_layout(mesh, 1, variant);
    const SolutionState init = initialize(mesh, layout, params, &*qs.exact);
    std::vector<Observer> obs;
    obs.push_back([&](int step, const SolutionState& s) {
      if (step == 0) return;
      const ConformityReport rep = divergence_conformity_report(mesh, layout, s);
      worst = std::max(worst, rep.max_jump_u_n / std::max(rep.scale_u_n, 1e-30));
      worst = std::max(worst, rep.max_jump_z_n / std::max(rep.scale_z_n, 1e-30));
    });
    run(mesh, layout, params, TimeGrid{5e-3, 5}, qs.scheme, qs.data, init, obs);
  }
  report(6, worst <= 1e-10,
         fmt("normal components of u_h and z_h single-valued across interior facets "
             "on every sampled step, both variants: max relative jump %.2e",
             worst));
}

void criterion_energy_decay() {
  BenchmarkCase qs = quasistatic_case();
  const Mesh mesh = qs.mesh_at_size(4, 4);
  ModelParams params = qs.params;
  params.k = 1;
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  ProblemData forcing;
  forcing.source = [](const Eigen::Vector2d& x, double) {
    return std::sin(2.0 * x(0)) + x(1);
  };
  const CondensedSystem prep(mesh, layout, params, SchemeWeights::static_problem());
  const SolutionState initial = prep.solve_step(forcing, 0.0);
  std::vector<double> xs;
  std::vector<Observer> obs;
  obs.push_back([&](int, const SolutionState& s) {
    xs.push_back(energy_x(mesh, layout, params, s));
  });
  run(mesh, layout, params, TimeGrid{0.2, 20}, Scheme::backward_euler, ProblemData{},
      initial, obs);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i)
    worst = std::max(worst, (xs[i] - xs[i - 1]) / std::max(xs[i - 1], 1e-30));
  report(7, xs.front() > 0.0 && worst <= 1e-12,
         fmt("unforced backward Euler energy is nonincreasing over 20 steps from a "
             "nonzero state: max relative increase %.2e",
             worst));
}

void criterion_stability_constants() {
  BenchmarkCase qs = quasistatic_case();
  double min_coercivity = std::numeric_limits<double>::infinity();
  double min_sigma = std::numeric_limits<double>::infinity();
  double trend = std::numeric_limits<double>::infinity();
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    std::vector<InfSupValues> vals;
    // n = 1 is degenerate for the EDG trace (every vertex lies on Gamma_D)
    for (int n : {2, 4, 8}) {
      const Mesh mesh = qs.mesh_at_size(n, n);
      ModelParams params = qs.params;
      params.k = 1;
      const DofLayout layout = build_layout(mesh, 1, variant);
      min_coercivity = std::min(min_coercivity, coercivity_check(mesh, layout, params).ratio);
      vals.push_back(infsup_estimate(mesh, layout));
      min_sigma = std::min({min_sigma, vals.back().displacement_pressure,
                            vals.back().velocity_pressure});
    }
    trend = std::min(trend, vals.back().displacement_pressure /
                                vals.front().displacement_pressure);
    trend = std::min(trend,
                     vals.back().velocity_pressure / vals.front().velocity_pressure);
  }
  report(8, min_coercivity > 0.0 && min_sigma > 0.0 && trend >= 0.5,
         fmt("coercivity ratio %.3f > 0 and inf-sup constants %.3e > 0 with "
             "refinement trend %.2f >= 0.5 on 3 meshes",
             min_coercivity, min_sigma, trend));
}

void criterion_cantilever() {
  namespace fs = std::filesystem;
  cli::RunConfig cfg;
  cfg.case_name = "cantilever";
  cfg.output_dir = "acceptance_out/cantilever";
  cfg.export_every = 1;
  fs::remove_all(cfg.output_dir);
  const int code = cli::cmd_solve(cfg);

  bool files_ok = true;
  for (const char* f : {"line_x0.26.csv", "line_x0.33.csv", "line_x0.40.csv",
                        "line_x0.46.csv", "manifest.json"})
    files_ok = files_ok && fs::exists(fs::path(cfg.output_dir) / f);

  // rerun in-process to gate finiteness and the c0 = 0 conformity property
  BenchmarkCase bc = cantilever_case();
  const Mesh mesh = bc.mesh_at_level(0);
  const DofLayout layout = build_layout(mesh, bc.params.k, bc.default_variant);
  const SolutionState init = zero_state(layout);
  double worst = 0.0;
  bool finite = true;
  std::vector<Observer> obs;
  obs.push_back([&](int step, const SolutionState& s) {
    finite = finite && s.finite();
    if (step == 0) return;
    const ConformityReport rep = divergence_conformity_report(mesh, layout, s);
    worst = std::max(worst, rep.max_jump_u_n / std::max(rep.scale_u_n, 1e-30));
    worst = std::max(worst, rep.max_jump_z_n / std::max(rep.scale_z_n, 1e-30));
  });
  run(mesh, layout, bc.params, bc.grid, bc.scheme, bc.data, init, obs);
  report(9, code == 0 && files_ok && finite && worst <= 1e-10,
         fmt("cantilever demo (128 cells, k=2, 5 steps, c0=0): exit %d, line CSVs %s, "
             "fields finite %s, max relative conformity jump %.2e",
             code, files_ok ? "written" : "MISSING", finite ? "yes" : "NO", worst));
}

void criterion_footing() {
  BenchmarkCase bc = footing_case();
  const bool lambda_ok = std::abs(bc.params.lambda() / 1e7 - 1.0) < 0.01;
  const Mesh mesh = bc.mesh_at_level(0);
  const DofLayout layout = build_layout(mesh, bc.params.k, Variant::hdg);
  const SolutionState init = zero_state(layout);
  bool finite = true;
  double max_p = 0.0;
  std::vector<Observer> obs;
  obs.push_back([&](int, const SolutionState& s) {
    finite = finite && s.finite();
    max_p = std::max(max_p, s.p.lpNorm<Eigen::Infinity>());
  });
  const SolutionState last =
      run(mesh, layout, bc.params, bc.grid, bc.scheme, bc.data, init, obs);
  namespace fs = std::filesystem;
  fs::create_directories("acceptance_out/footing");
  write_vtk("acceptance_out/footing/footing_final.vtk", mesh, layout, last, "footing");
  const bool vtk_ok = fs::exists("acceptance_out/footing/footing_final.vtk");
  const bool bounded = finite && max_p < 1e8;  // pressure scale is sigma0 = 1e4
  report(10, lambda_ok && bounded && vtk_ok,
         fmt("footing demo (8192 cells, k=2, BDF2 to T=50, lambda ~ 1e7): max |p| "
             "coefficient %.3e bounded, fields finite %s, VTK written %s",
             max_p, finite ? "yes" : "NO", vtk_ok ? "yes" : "no"));
}

void criterion_mms_residuals() {
  double worst = 0.0;
  for (double E : {1.0, 1e4})
    for (double nu : {0.4, 0.49999}) {
      BenchmarkCase bc = static_case(E, nu);
      worst = std::max(worst, residual_check(*bc.exact, bc.params, true, 100, 31));
    }
  BenchmarkCase qs = quasistatic_case();
  worst = std::max(worst, residual_check(*qs.exact, qs.params, false, 100, 32));
  report(11, worst <= 1e-8,
         fmt("every exact-solution bundle satisfies the model equations at 100 random "
             "points: max relative residual %.2e (tol 1e-8)",
             worst));
}

void criterion_quadrature_basis() {
  bool ok = true;
  std::string note;
  // quadrature exactness against the closed-form monomial integrals
  for (int deg : {2, 5, 8, 10}) {
    const QuadratureRule rule = triangle_quadrature(deg);
    for (int a = 0; a <= deg && ok; ++a) {
      for (int b = 0; a + b <= deg && ok; ++b) {
        double s = 0.0;
        for (int q = 0; q < rule.size(); ++q)
          s += rule.weights(q) * std::pow(rule.points(q, 0), a) *
               std::pow(rule.points(q, 1), b);
        double num = 1.0, den = 1.0;
        for (int i = 2; i <= a; ++i) num *= i;
        for (int i = 2; i <= b; ++i) num *= i;
        for (int i = 2; i <= a + b + 2; ++i) den *= i;
        if (std::abs(s - num / den) > 1e-13 * std::max(1.0, std::abs(num / den))) {
          ok = false;
          note = fmt("monomial x^%d y^%d at degree %d off", a, b, deg);
        }
      }
    }
  }
  // orthonormality and gradient consistency
  for (int k : {1, 2, 3}) {
    const TriangleBasis basis(k);
    const QuadratureRule rule = triangle_quadrature(2 * k);
    const Eigen::MatrixXd v = basis.values(rule.points);
    const Eigen::MatrixXd gram = v.transpose() * rule.weights.asDiagonal() * v;
    if ((gram - Eigen::MatrixXd::Identity(basis.size(), basis.size()))
            .cwiseAbs()
            .maxCoeff() > 1e-12) {
      ok = false;
      note = fmt("orthonormality failed at k=%d", k);
    }
    const double h = 1e-6;
    Eigen::Matrix<double, 5, 2> pts;
    pts << 0.31, 0.4, 0.31 + h, 0.4, 0.31 - h, 0.4, 0.31, 0.4 + h, 0.31, 0.4 - h;
    Eigen::MatrixXd vv, dx, dy;
    basis.tabulate(pts, &vv, &dx, &dy);
    for (int m = 0; m < basis.size(); ++m) {
      const double fdx = (vv(1, m) - vv(2, m)) / (2 * h);
      const double fdy = (vv(3, m) - vv(4, m)) / (2 * h);
      if (std::abs(fdx - dx(0, m)) > 1e-5 * std::max(1.0, std::abs(dx(0, m))) ||
          std::abs(fdy - dy(0, m)) > 1e-5 * std::max(1.0, std::abs(dy(0, m)))) {
        ok = false;
        note = fmt("gradient check failed at k=%d", k);
      }
    }
  }
  report(12, ok,
         "quadrature exactness, basis orthonormality and gradient consistency gates" +
             (note.empty() ? std::string() : " (" + note + ")"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  // cheap structural gates first, the heavy convergence studies afterwards
  criterion_quadrature_basis();                       // 12
  criterion_mms_residuals();                          // 11
  criterion_zero_data();                              // 5
  criterion_condensation_oracle();                    // 4
  criterion_conformity();                             // 6
  criterion_energy_decay();                           // 7
  criterion_stability_constants();                    // 8
  criterion_cantilever();                             // 9
  criterion_quasistatic(1, 1, 4, {1.8, 0.9, 1.8, 0.9});
  criterion_quasistatic(2, 2, 3, {2.8, 1.8, 2.8, 1.8});
  criterion_static_robustness();                      // 3
  criterion_footing();                                // 10

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance: %d of 12 criteria failed (%.1f s)\n", failures, seconds);
  return failures == 0 ? 0 : 1;
}
