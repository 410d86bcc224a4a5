// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "porohdg/mms.hpp"
#include "porohdg/system.hpp"

namespace porohdg {

/// Discrete elasticity projection of an exact displacement field: the pair
/// (u_h, ubar_h) solving a_h(proj, v) = a_h((u, u), v) for all discrete test
/// pairs, with the essential trace values on Gamma_D taken from the field
/// itself. Exact for fields whose element and skeleton restrictions lie in
/// the discrete spaces.
void elliptic_projection(const Mesh& mesh, const DofLayout& layout,
                         const ModelParams& params,
                         const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& u_fn,
                         const std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>& grad_u_fn,
                         Eigen::VectorXd& u, Eigen::VectorXd& ubar);

/// Element-wise L2 projections.
Eigen::VectorXd l2_project_scalar(const Mesh& mesh, const DofLayout& layout,
                                  const std::function<double(const Eigen::Vector2d&)>& fn);
Eigen::VectorXd l2_project_vector(const Mesh& mesh, const DofLayout& layout,
                                  const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn);

/// Initial state at t = 0: the displacement pair by the elliptic projection,
/// the scalar fields by L2 projections, the velocity by the vector L2
/// projection, the pressure traces by facet projections. A null exact
/// solution yields the zero state.
SolutionState initialize(const Mesh& mesh, const DofLayout& layout,
                         const ModelParams& params, const ExactSolution* exact);

using Observer = std::function<void(int step, const SolutionState&)>;

struct RunOptions {
  int start_step = 0;                           // resume index (state is at this step)
  const SolutionState* prev_for_bdf2 = nullptr; // level start_step - 1 when resuming
};

/// Advance from `initial` to the end of the grid. The two-level scheme starts
/// with one backward Euler step; the step matrices are assembled and
/// factorized once and reused. Observers run after every step (and once for
/// the initial state when starting from step 0); they must not mutate solver
/// state. Returns the terminal state.
SolutionState run(const Mesh& mesh, const DofLayout& layout, const ModelParams& params,
                  const TimeGrid& grid, Scheme scheme, const ProblemData& data,
                  const SolutionState& initial, const std::vector<Observer>& observers,
                  const RunOptions& opts = {});

}  // namespace porohdg
