// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "porohdg/mesh.hpp"
#include "porohdg/spaces.hpp"
#include "porohdg/system.hpp"

namespace porohdg {

/// Legacy ASCII unstructured-grid export of one state. Every cell is sampled
/// on its degree-k node lattice and emitted as k^2 sub-triangles with
/// per-cell duplicated points, so discontinuities across facets are kept
/// rather than smoothed. Fields: displacement and darcy_velocity as 3-vectors
/// (zero third component), pressure and total_pressure as scalars.
void write_vtk(const std::string& path, const Mesh& mesh, const DofLayout& layout,
               const SolutionState& state, const std::string& title = "porohdg fields");

}  // namespace porohdg
