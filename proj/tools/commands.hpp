// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "config.hpp"
#include "porohdg/analysis.hpp"
#include "porohdg/mms.hpp"

namespace porohdg::cli {

/// Config resolved against the case defaults: effective coefficients, variant,
/// mesh, scheme and grid.
struct PreparedCase {
  BenchmarkCase bc;
  ModelParams params;
  Variant variant = Variant::hdg;
  Mesh mesh;
  bool is_static = false;
  Scheme scheme = Scheme::bdf2;
  TimeGrid grid;
};
PreparedCase prepare(const RunConfig& cfg);

/// Exit codes: 0 success, 1 usage/config error (thrown as
/// std::invalid_argument), 2 numerical failure, 3 gate failure.
int cmd_solve(const RunConfig& cfg);
int cmd_convergence(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

/// Pressure along the vertical line x = x0 at `n_samples` evenly spaced
/// heights (used by the cantilever exports).
std::vector<std::pair<double, double>> sample_vertical_line(const Mesh& mesh,
                                                            const DofLayout& layout,
                                                            const SolutionState& state,
                                                            double x0, int n_samples);

}  // namespace porohdg::cli
