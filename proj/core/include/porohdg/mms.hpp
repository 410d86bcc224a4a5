// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "porohdg/mesh.hpp"
#include "porohdg/params.hpp"
#include "porohdg/system.hpp"

namespace porohdg {

/// Closed-form exact solution bundle: primal fields with analytic gradients,
/// the derived fields p_T = -lambda div u + alpha p, z = -kappa grad p,
/// sigma = 2 mu eps(u) - p_T I, and the hand-derived loads f, g.
struct ExactSolution {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> u;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&, double)> grad_u;  // (i,j) = du_i/dx_j
  std::function<double(const Eigen::Vector2d&, double)> p;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> grad_p;
  std::function<double(const Eigen::Vector2d&, double)> p_T;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> z;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&, double)> stress;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> f;
  std::function<double(const Eigen::Vector2d&, double)> g;
};

/// Maximum relative residual of the four model equations at `n_points` random
/// space-time samples, with the spatial/temporal derivatives of the derived
/// fields taken by central differences of the analytic first-level fields.
/// Gates every exact-solution bundle before it is used to drive a solver.
double residual_check(const ExactSolution& sol, const ModelParams& params,
                      bool static_problem, int n_points, unsigned seed);

enum class Scheme { backward_euler, bdf2 };

/// Uniform time grid on (0, T].
struct TimeGrid {
  double t_final = 1.0;
  int n_steps = 1;

  double dt() const { return t_final / n_steps; }
  double t(int n) const { return t_final * n / n_steps; }
};

/// A fully specified problem: domain/tag rules, coefficients, loads and
/// boundary data, defaults for scheme/grid/variant, and the exact solution
/// when one exists.
struct BenchmarkCase {
  std::string name;
  ModelParams params;
  bool is_static = false;
  Scheme scheme = Scheme::bdf2;
  TimeGrid grid;
  Variant default_variant = Variant::hdg;
  std::function<Mesh(int level)> mesh_at_level;        // tagged mesh, level 0 coarsest
  std::function<Mesh(int nx, int ny)> mesh_at_size;    // tagged mesh, explicit resolution
  std::optional<ExactSolution> exact;
  ProblemData data;
};

/// Static manufactured problem on the unit square (mildly compressible
/// through quasi-incompressible regimes; E and nu are free).
BenchmarkCase static_case(double E, double nu);

/// Quasi-static manufactured problem on the unit square.
BenchmarkCase quasistatic_case();

/// Strip footing consolidation on (-50, 50) x (0, 75): loaded top segment,
/// drained boundary, near-incompressible solid.
BenchmarkCase footing_case(int nx = 64, int ny = 64);

/// Cantilever bracket on the unit square: sealed boundary (zero normal flux
/// everywhere), zero storage coefficient, low permeability.
BenchmarkCase cantilever_case();

/// Look up a case by CLI name: static_mms, quasistatic_mms, footing,
/// cantilever.
BenchmarkCase benchmark_by_name(const std::string& name);

/// Same case with different coefficients; the manufactured solution and the
/// derived data are re-derived so they stay consistent with the parameters.
BenchmarkCase with_params(const BenchmarkCase& base, const ModelParams& params);

}  // namespace porohdg
