// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/analysis.hpp"

#include <cmath>

#include "doctest.h"
#include "porohdg/timeloop.hpp"

using namespace porohdg;

namespace {

// polynomial solution representable in the k = 2 spaces: u in P_2^2, p in P_1,
// so p_T in P_1 and z constant; the discrete solution must reproduce it to
// solver precision
BenchmarkCase polynomial_case() {
  BenchmarkCase bc;
  bc.name = "static_poly";
  bc.is_static = true;
  bc.params.E = 10.0;
  bc.params.nu = 0.3;
  bc.params.kappa = 0.5;
  bc.params.alpha = 0.4;
  bc.params.c0 = 0.2;
  const double lambda = bc.params.lambda();
  const double mu = bc.params.mu();
  const double alpha = bc.params.alpha;
  const double kappa = bc.params.kappa;
  const double c0 = bc.params.c0;

  ExactSolution s;
  s.u = [](const Eigen::Vector2d& x, double) -> Eigen::Vector2d {
    return {x(0) * x(0) + x(1), x(0) - x(1) * x(1)};
  };
  s.grad_u = [](const Eigen::Vector2d& x, double) -> Eigen::Matrix2d {
    Eigen::Matrix2d g;
    g << 2 * x(0), 1.0, 1.0, -2 * x(1);
    return g;
  };
  s.p = [](const Eigen::Vector2d& x, double) { return 1.0 + 2.0 * x(0) - x(1); };
  s.grad_p = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d(2.0, -1.0); };
  s.p_T = [=](const Eigen::Vector2d& x, double t) {
    return -lambda * (2 * x(0) - 2 * x(1)) + alpha * s.p(x, t);
  };
  s.z = [=](const Eigen::Vector2d&, double) { return Eigen::Vector2d(-2 * kappa, kappa); };
  s.stress = [=](const Eigen::Vector2d& x, double t) -> Eigen::Matrix2d {
    Eigen::Matrix2d eps;
    eps << 2 * x(0), 1.0, 1.0, -2 * x(1);
    eps(0, 1) = eps(1, 0) = 1.0;
    return 2.0 * mu * eps - s.p_T(x, t) * Eigen::Matrix2d::Identity();
  };
  // div(2 mu eps) = 2 mu (2, -2); grad p_T = (-2 lambda + 2 alpha, 2 lambda - alpha)
  s.f = [=](const Eigen::Vector2d&, double) -> Eigen::Vector2d {
    return {-2.0 * mu * 2.0 + (-2.0 * lambda + 2.0 * alpha),
            -2.0 * mu * (-2.0) + (2.0 * lambda - alpha)};
  };
  s.g = [=](const Eigen::Vector2d& x, double t) {
    return c0 * s.p(x, t) + alpha / lambda * (alpha * s.p(x, t) - s.p_T(x, t));
  };
  bc.exact = s;
  bc.data.body_force = s.f;
  bc.data.source = s.g;
  bc.data.displacement_bc = s.u;
  bc.data.pressure_bc = s.p;
  bc.data.traction_bc = [st = s.stress](const Eigen::Vector2d& x, const Eigen::Vector2d& n,
                                        double t) -> Eigen::Vector2d {
    return st(x, t) * n;
  };
  bc.data.normal_flux_bc = [z = s.z](const Eigen::Vector2d& x, const Eigen::Vector2d& n,
                                     double t) { return z(x, t).dot(n); };
  const double eps = 1e-12;
  bc.mesh_at_level = [eps](int level) {
    return tag_boundary(
        build_structured_square(1 << level),
        {{[eps](const Eigen::Vector2d& x) {
            return x(1) < eps || x(1) > 1 - eps || x(0) < eps;
          },
          DispTag::dirichlet},
         {[eps](const Eigen::Vector2d& x) { return x(0) > 1 - eps; }, DispTag::traction}},
        {{[eps](const Eigen::Vector2d& x) { return x(1) < eps || x(0) > 1 - eps; },
          FlowTag::pressure},
         {[eps](const Eigen::Vector2d& x) { return x(1) > 1 - eps || x(0) < eps; },
          FlowTag::flux}});
  };
  return bc;
}

}  // namespace

TEST_CASE("polynomial bundle passes the residual gate") {
  BenchmarkCase bc = polynomial_case();
  CHECK(residual_check(*bc.exact, bc.params, true, 100, 5) < 1e-10);
}

TEST_CASE("representable static solution is reproduced to solver precision") {
  BenchmarkCase bc = polynomial_case();
  ModelParams params = bc.params;
  params.k = 2;
  for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
    const Mesh mesh = bc.mesh_at_level(1);
    const DofLayout layout = build_layout(mesh, 2, variant);
    const CondensedSystem sys(mesh, layout, params, SchemeWeights::static_problem());
    const SolutionState state = sys.solve_step(bc.data, 0.0);
    const ErrorRecord rec = compute_errors(mesh, layout, params, state, *bc.exact, 0.0);
    CHECK(rec.e_u < 1e-10);
    CHECK(rec.e_pT < 1e-10 * std::max(1.0, rec.n_pT));
    CHECK(rec.e_z < 1e-10);
    CHECK(rec.e_p < 1e-10);
    CHECK(rec.e_u_v < 1e-9);
  }
}

TEST_CASE("rate table guards rates at the rounding floor") {
  BenchmarkCase bc = polynomial_case();
  StudyOptions opts;
  opts.n_levels = 2;
  const RateTable table = convergence_study(bc, Variant::hdg, 2, opts);
  REQUIRE(table.rows.size() == 2);
  // spurious rates are suppressed, not reported as large numbers
  for (int f = 0; f < 4; ++f) CHECK(std::isnan(table.rates[1][f]));
  const std::string csv = table.csv();
  CHECK(csv.find("cells,dofs,h,e_u,r_u,e_pT,r_pT,e_z,r_z,e_p,r_p") == 0);
  // identical rerun gives identical bytes
  const RateTable again = convergence_study(bc, Variant::hdg, 2, opts);
  CHECK(table.csv() == again.csv());
  CHECK(table.text() == again.text());
}

TEST_CASE("two-level study on the coarsest meshes emits a two-row table") {
  BenchmarkCase bc = static_case(10.0, 0.3);
  StudyOptions opts;
  opts.n_levels = 2;
  opts.level_offset = 0;
  const RateTable table = convergence_study(bc, Variant::hdg, 1, opts);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].cells == 32);
  CHECK(table.rows[1].cells == 128);
  CHECK(table.rows[1].e_u < table.rows[0].e_u);
}

TEST_CASE("energies of the zero state vanish") {
  BenchmarkCase bc = polynomial_case();
  const Mesh mesh = bc.mesh_at_level(1);
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);
  ModelParams params = bc.params;
  params.k = 1;
  const SolutionState s = zero_state(layout);
  CHECK(energy_x(mesh, layout, params, s) == 0.0);
  CHECK(energy_y(mesh, layout, params, s) == 0.0);
}

TEST_CASE("unforced backward Euler dissipates the discrete energy") {
  // well-prepared nonzero initial state: solve the static problem with a
  // nonzero source, then evolve with all data removed
  const double eps = 1e-12;
  Mesh mesh = tag_boundary(
      build_structured_square(4),
      {{[eps](const Eigen::Vector2d& x) {
          return x(1) < eps || x(1) > 1 - eps || x(0) < eps;
        },
        DispTag::dirichlet},
       {[eps](const Eigen::Vector2d& x) { return x(0) > 1 - eps; }, DispTag::traction}},
      {{[eps](const Eigen::Vector2d& x) { return x(1) < eps || x(0) > 1 - eps; },
        FlowTag::pressure},
       {[eps](const Eigen::Vector2d& x) { return x(1) > 1 - eps || x(0) < eps; },
        FlowTag::flux}});
  ModelParams params;
  params.E = 50.0;
  params.nu = 0.35;
  params.kappa = 0.1;
  params.alpha = 0.5;
  params.c0 = 0.3;
  params.k = 1;
  const DofLayout layout = build_layout(mesh, 1, Variant::hdg);

  ProblemData forcing;
  forcing.source = [](const Eigen::Vector2d& x, double) {
    return std::sin(2.0 * x(0)) + x(1);
  };
  const CondensedSystem prep(mesh, layout, params, SchemeWeights::static_problem());
  const SolutionState initial = prep.solve_step(forcing, 0.0);
  CHECK(energy_x(mesh, layout, params, initial) > 0.0);

  std::vector<double> xs;
  std::vector<Observer> obs;
  obs.push_back([&](int, const SolutionState& s) {
    xs.push_back(energy_x(mesh, layout, params, s));
  });
  TimeGrid grid{0.2, 20};
  run(mesh, layout, params, grid, Scheme::backward_euler, ProblemData{}, initial, obs);
  REQUIRE(xs.size() == 21);
  for (std::size_t i = 1; i < xs.size(); ++i)
    CHECK(xs[i] <= xs[i - 1] * (1.0 + 1e-12));
  CHECK(xs.back() < xs.front());
}

TEST_CASE("robustness comparison across the Poisson ratio") {
  const RobustnessReport rep = robustness_compare(
      {{1e4, 0.4}, {1e4, 0.49999}}, Variant::hdg, 1, 0);
  REQUIRE(rep.runs.size() == 2);
  CHECK(rep.ratio_u < 3.0);
  CHECK(rep.ratio_z < 3.0);
  CHECK(rep.ratio_p < 3.0);
  CHECK(rep.ratio_u >= 1.0);
}
