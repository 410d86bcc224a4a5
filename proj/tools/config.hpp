// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>

namespace porohdg::cli {

/// A fully specified run. Parseable from a single JSON config file (unknown
/// keys rejected) and overridable by command line flags that mirror the keys.
struct RunConfig {
  std::string case_name = "quasistatic_mms";
  std::string variant;  // "hdg" | "edg-hdg" ("": case default)
  int k = 0;            // 0: case default

  // mesh: structured resolution or a mesh file with embedded tags
  std::optional<int> mesh_n;
  std::optional<int> mesh_nx, mesh_ny;
  std::optional<std::string> mesh_file;

  std::string scheme;  // "", "be", "bdf2", "static" ("": case default)
  double dt = 0.0;     // 0: case default
  double t_final = 0.0;

  std::optional<double> E, nu, kappa, alpha, c0, beta;

  std::string output_dir = "out";
  bool export_vtk = true;
  bool export_csv = true;
  bool export_checkpoints = false;
  int export_every = 1;
  unsigned seed = 12345;

  int levels = 3;
  int level_offset = 0;
  std::optional<std::array<double, 4>> gate_rates;  // (u, pT, z, p)
};

/// Strict parse: unknown keys anywhere in the file are an error.
RunConfig parse_config_file(const std::string& path);

/// Effective-config echo (all values, defaults filled) as a JSON string; a
/// manifest with this block reproduces the run exactly.
std::string config_to_json(const RunConfig& cfg);

}  // namespace porohdg::cli
