// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace porohdg {

inline constexpr const char* version_string = "porohdg 0.1.0";

}  // namespace porohdg
