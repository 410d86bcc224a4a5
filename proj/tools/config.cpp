// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "porohdg/check.hpp"

namespace porohdg::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    POROHDG_REQUIRE(known.count(key) > 0,
                    "config: unknown key '" << key << "' in " << where);
    (void)value;
  }
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  POROHDG_REQUIRE(in.good(), "config: cannot open " << path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    POROHDG_REQUIRE(false, "config: parse error in " << path << ": " << err.what());
  }
  POROHDG_REQUIRE(j.is_object(), "config: top level must be an object");
  reject_unknown(j,
                 {"case", "variant", "k", "mesh", "scheme", "dt", "T", "params",
                  "output_dir", "export", "seed", "levels", "level_offset", "gate_rates"},
                 "the top level");

  RunConfig cfg;
  if (j.contains("case")) cfg.case_name = j["case"].get<std::string>();
  if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
  if (j.contains("k")) cfg.k = j["k"].get<int>();
  if (j.contains("scheme")) cfg.scheme = j["scheme"].get<std::string>();
  if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
  if (j.contains("T")) cfg.t_final = j["T"].get<double>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
  if (j.contains("levels")) cfg.levels = j["levels"].get<int>();
  if (j.contains("level_offset")) cfg.level_offset = j["level_offset"].get<int>();

  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    reject_unknown(m, {"n", "nx", "ny", "file"}, "mesh");
    if (m.contains("n")) cfg.mesh_n = m["n"].get<int>();
    if (m.contains("nx")) cfg.mesh_nx = m["nx"].get<int>();
    if (m.contains("ny")) cfg.mesh_ny = m["ny"].get<int>();
    if (m.contains("file")) cfg.mesh_file = m["file"].get<std::string>();
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    reject_unknown(p, {"E", "nu", "kappa", "alpha", "c0", "beta"}, "params");
    if (p.contains("E")) cfg.E = p["E"].get<double>();
    if (p.contains("nu")) cfg.nu = p["nu"].get<double>();
    if (p.contains("kappa")) cfg.kappa = p["kappa"].get<double>();
    if (p.contains("alpha")) cfg.alpha = p["alpha"].get<double>();
    if (p.contains("c0")) cfg.c0 = p["c0"].get<double>();
    if (p.contains("beta")) cfg.beta = p["beta"].get<double>();
  }
  if (j.contains("export")) {
    const json& e = j["export"];
    reject_unknown(e, {"vtk", "csv", "checkpoints", "every"}, "export");
    if (e.contains("vtk")) cfg.export_vtk = e["vtk"].get<bool>();
    if (e.contains("csv")) cfg.export_csv = e["csv"].get<bool>();
    if (e.contains("checkpoints")) cfg.export_checkpoints = e["checkpoints"].get<bool>();
    if (e.contains("every")) cfg.export_every = e["every"].get<int>();
  }
  if (j.contains("gate_rates")) {
    const auto v = j["gate_rates"].get<std::vector<double>>();
    POROHDG_REQUIRE(v.size() == 4, "config: gate_rates needs 4 values (u, pT, z, p)");
    cfg.gate_rates = std::array<double, 4>{v[0], v[1], v[2], v[3]};
  }
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["case"] = cfg.case_name;
  j["variant"] = cfg.variant;
  j["k"] = cfg.k;
  json m = json::object();
  if (cfg.mesh_n) m["n"] = *cfg.mesh_n;
  if (cfg.mesh_nx) m["nx"] = *cfg.mesh_nx;
  if (cfg.mesh_ny) m["ny"] = *cfg.mesh_ny;
  if (cfg.mesh_file) m["file"] = *cfg.mesh_file;
  j["mesh"] = m;
  j["scheme"] = cfg.scheme;
  j["dt"] = cfg.dt;
  j["T"] = cfg.t_final;
  json p = json::object();
  if (cfg.E) p["E"] = *cfg.E;
  if (cfg.nu) p["nu"] = *cfg.nu;
  if (cfg.kappa) p["kappa"] = *cfg.kappa;
  if (cfg.alpha) p["alpha"] = *cfg.alpha;
  if (cfg.c0) p["c0"] = *cfg.c0;
  if (cfg.beta) p["beta"] = *cfg.beta;
  j["params"] = p;
  j["output_dir"] = cfg.output_dir;
  j["export"] = {{"vtk", cfg.export_vtk},
                 {"csv", cfg.export_csv},
                 {"checkpoints", cfg.export_checkpoints},
                 {"every", cfg.export_every}};
  j["seed"] = cfg.seed;
  j["levels"] = cfg.levels;
  j["level_offset"] = cfg.level_offset;
  if (cfg.gate_rates)
    j["gate_rates"] = std::vector<double>(cfg.gate_rates->begin(), cfg.gate_rates->end());
  return j.dump(2);
}

}  // namespace porohdg::cli
