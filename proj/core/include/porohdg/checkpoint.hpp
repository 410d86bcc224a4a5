// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "porohdg/spaces.hpp"
#include "porohdg/system.hpp"

namespace porohdg {

/// A restartable snapshot: the state at `step` plus, when present, the state
/// one level earlier (needed to resume a two-level scheme). Serialized as
/// versioned ASCII with hexfloat coefficients, so it round-trips bit-exactly.
struct Checkpoint {
  std::uint64_t mesh_hash = 0;
  std::uint64_t layout_hash = 0;
  int step = 0;
  SolutionState state;
  std::optional<SolutionState> previous;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);

/// Loads and validates against the expected mesh/layout hashes.
Checkpoint load_checkpoint(const std::string& path, std::uint64_t mesh_hash,
                           std::uint64_t layout_hash);

}  // namespace porohdg
