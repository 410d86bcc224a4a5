// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "porohdg/forms.hpp"
#include "porohdg/mesh.hpp"
#include "porohdg/params.hpp"
#include "porohdg/spaces.hpp"

namespace porohdg {

/// Time-discretization weights of the storage terms: the new-level terms are
/// multiplied by w_new, the right-hand side carries w_prev (level n) and
/// w_prev2 (level n-1) times the stored history combination.
struct SchemeWeights {
  double w_new = 1.0;
  double w_prev = 0.0;
  double w_prev2 = 0.0;

  static SchemeWeights static_problem() { return {1.0, 0.0, 0.0}; }
  static SchemeWeights backward_euler(double dt) { return {1.0 / dt, 1.0 / dt, 0.0}; }
  static SchemeWeights bdf2(double dt) { return {1.5 / dt, 2.0 / dt, -0.5 / dt}; }

  bool uses_history() const { return w_prev != 0.0 || w_prev2 != 0.0; }
};

/// Coefficient vectors of all seven fields at one time level. Trace vectors
/// are full-length; constrained entries carry the prescribed boundary values.
struct SolutionState {
  Eigen::VectorXd u, pT, z, p;
  Eigen::VectorXd ubar, pTbar, pbar;
  double time = 0.0;

  bool finite() const;
};
SolutionState zero_state(const DofLayout& layout);

/// Loads and boundary data as time-dependent callables; a default-constructed
/// (null) entry means identically zero. The traction and normal-flux data
/// additionally receive the outward boundary normal at the evaluation point.
struct ProblemData {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> body_force;      // f
  std::function<double(const Eigen::Vector2d&, double)> source;                   // g
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> displacement_bc; // on Gamma_D
  std::function<double(const Eigen::Vector2d&, double)> pressure_bc;              // on Gamma_P
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&,
                                double)> traction_bc;                             // sigma n on Gamma_T
  std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&, double)>
      normal_flux_bc;                                                             // z . n on Gamma_F
};

/// Prescribed essential trace values at time t (projection of the boundary
/// data onto the trace spaces over the Dirichlet/pressure facets).
void prescribed_trace_values(const Mesh& mesh, const DofLayout& layout,
                             const ProblemData& data, double t,
                             Eigen::VectorXd& ubar_values, Eigen::VectorXd& pbar_values);

/// Sparse LU with Ruiz equilibration and iterative refinement.
class ScaledSparseLU {
 public:
  void compute(const Eigen::SparseMatrix<double>& A);
  /// Solves to a small relative residual; reports the achieved value.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double* rel_residual = nullptr) const;

 private:
  Eigen::SparseMatrix<double> A_, As_;
  Eigen::VectorXd dr_, dc_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  double scale_ = 1.0;
};

/// One fully discrete step operator: per-element interior blocks are
/// eliminated (static condensation) onto the facet unknowns, the global
/// facet-only matrix is factorized once and reused for every step with the
/// same (mesh, params, dt). Local recovery reproduces the interior fields.
class CondensedSystem {
 public:
  CondensedSystem(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                  SchemeWeights weights);
  CondensedSystem(CondensedSystem&&) noexcept;
  CondensedSystem& operator=(CondensedSystem&&) noexcept;
  ~CondensedSystem();

  /// Advance to time t_new. `prev` is required when the scheme carries
  /// history; `prev2` additionally for the two-level scheme.
  SolutionState solve_step(const ProblemData& data, double t_new,
                           const SolutionState* prev = nullptr,
                           const SolutionState* prev2 = nullptr) const;

  double last_residual() const { return last_residual_; }
  int n_facet_unknowns() const { return layout_->n_condensed(); }
  const Eigen::SparseMatrix<double>& facet_matrix() const { return S_; }

  static constexpr double residual_tolerance = 1e-11;

 private:
  struct ElementOp;
  const Mesh* mesh_;
  const DofLayout* layout_;
  ModelParams params_;
  SchemeWeights weights_;
  ReferenceTables tables_;
  std::vector<ElementOp> elems_;
  Eigen::SparseMatrix<double> S_;
  ScaledSparseLU lu_;
  mutable double last_residual_ = 0.0;
};

/// Uncondensed single-matrix solve of the same step equations; the oracle the
/// condensation path is checked against. Dense-feasible problem sizes only.
SolutionState solve_step_monolithic(const Mesh& mesh, const DofLayout& layout,
                                    const ModelParams& params, SchemeWeights weights,
                                    const ProblemData& data, double t_new,
                                    const SolutionState* prev = nullptr,
                                    const SolutionState* prev2 = nullptr,
                                    double* rel_residual = nullptr);

/// Pointwise facet checks of the divergence conformity of the computed
/// displacement and Darcy velocity: maxima over facet quadrature points of
/// the interior normal jumps and of |u . n - ubar . n| on traction facets,
/// with the sampled field scales for relative gating.
struct ConformityReport {
  double max_jump_u_n = 0.0;
  double max_jump_z_n = 0.0;
  double max_traction_gap_u_n = 0.0;
  double scale_u_n = 0.0;
  double scale_z_n = 0.0;
};
ConformityReport divergence_conformity_report(const Mesh& mesh, const DofLayout& layout,
                                              const SolutionState& state);

/// Smallest generalized singular values of the two mixed-form stability
/// conditions on one mesh: the displacement/total-pressure pairing measured in
/// (|||.|||_v, |||.|||_q) and the velocity/pore-pressure pairing measured in
/// (||.||, |||.|||_q). Dense computation, small meshes only.
struct InfSupValues {
  double displacement_pressure = 0.0;  // pairs (v, q)
  double velocity_pressure = 0.0;      // (w, q) with constrained pressure trace
};
InfSupValues infsup_estimate(const Mesh& mesh, const DofLayout& layout);

}  // namespace porohdg
