// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "porohdg/mms.hpp"
#include "porohdg/system.hpp"

namespace porohdg {

/// Errors of one solved configuration against the exact solution at time t.
struct ErrorRecord {
  int cells = 0;
  long long dofs = 0;        // all field coefficients (uncondensed)
  long long facet_dofs = 0;  // globally coupled facet unknowns after condensation
  double h = 0.0;

  double e_u = 0.0, e_pT = 0.0, e_z = 0.0, e_p = 0.0;  // L2 errors
  double e_u_v = 0.0;   // |||u - u_h|||_v
  double e_pT_q = 0.0;  // |||p_T - p_Th|||_q
  double composite = 0.0;  // parameter-weighted error combination
  double darcy_accum = 0.0;  // sum_i dt ||z^i - z_h^i||^2 observed over a run

  double n_u = 0.0, n_pT = 0.0, n_z = 0.0, n_p = 0.0;  // exact-field L2 norms
};

/// L2/norm errors by quadrature of exactness 2k + 4. `darcy_accum` is the
/// time-accumulated Darcy mismatch observed during the run (0 for static
/// solves); it enters the composite as kappa^{-1/2} sqrt(darcy_accum).
ErrorRecord compute_errors(const Mesh& mesh, const DofLayout& layout,
                           const ModelParams& params, const SolutionState& state,
                           const ExactSolution& exact, double t,
                           double darcy_accum = 0.0);

/// ||z_exact(t) - z_h||_Omega, the per-step ingredient of the accumulated
/// Darcy term.
double z_error_l2(const Mesh& mesh, const DofLayout& layout, const SolutionState& state,
                  const ExactSolution& exact, double t);

/// Refinement study: one ErrorRecord per level plus the rates between
/// consecutive levels, r = log2(e_coarse / e_fine). Rates are NaN on the
/// first row and when both errors sit at the rounding floor relative to the
/// exact field scale.
struct RateTable {
  std::vector<ErrorRecord> rows;
  std::vector<std::array<double, 4>> rates;  // (u, pT, z, p) per row

  std::string csv() const;
  std::string text() const;
};

struct StudyOptions {
  int n_levels = 3;
  int level_offset = 0;
  double dt = 0.0;       // 0: case default
  double t_final = 0.0;  // 0: case default
};

RateTable convergence_study(const BenchmarkCase& bc, Variant variant, int k,
                            const StudyOptions& opts);

/// Error ratios across a coefficient grid at one fixed mesh level (the
/// incompressibility-robustness diagnostic for the static problem).
struct RobustnessReport {
  double ratio_u = 0.0, ratio_pT = 0.0, ratio_z = 0.0, ratio_p = 0.0;
  struct Run {
    double E = 0.0, nu = 0.0;
    ErrorRecord record;
  };
  std::vector<Run> runs;
};
RobustnessReport robustness_compare(const std::vector<std::pair<double, double>>& E_nu,
                                    Variant variant, int k, int level);

/// Discrete energies X(t)^2 = a_h(u, u) + lambda^{-1} ||p_T - alpha p||^2 +
/// c0 ||p||^2 and Y(t)^2 = kappa^{-1} ||z||^2.
double energy_x(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                const SolutionState& state);
double energy_y(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                const SolutionState& state);

}  // namespace porohdg
