// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sstream>
#include <stdexcept>

namespace porohdg {

// Precondition violation (bad arguments, malformed input).
#define POROHDG_REQUIRE(cond, msg)                          \
  do {                                                      \
    if (!(cond)) {                                          \
      std::ostringstream oss_;                              \
      oss_ << msg;                                          \
      throw std::invalid_argument(oss_.str());              \
    }                                                       \
  } while (0)

// Runtime failure (singular matrix, solver breakdown, inconsistent state).
#define POROHDG_CHECK(cond, msg)                            \
  do {                                                      \
    if (!(cond)) {                                          \
      std::ostringstream oss_;                              \
      oss_ << msg;                                          \
      throw std::runtime_error(oss_.str());                 \
    }                                                       \
  } while (0)

}  // namespace porohdg
