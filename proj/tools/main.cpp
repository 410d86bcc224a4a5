// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "porohdg/version.hpp"

namespace {

using porohdg::cli::RunConfig;

// mirror the config keys onto flags of one subcommand
void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override its keys)");
  cmd->add_option("--case", cfg.case_name,
                  "benchmark case: static_mms, quasistatic_mms, footing, cantilever");
  cmd->add_option("--variant", cfg.variant, "trace variant: hdg or edg-hdg");
  cmd->add_option("--k", cfg.k, "polynomial degree (>= 1)");
  cmd->add_option("--n", [&cfg](const CLI::results_t& r) {
    cfg.mesh_n = std::stoi(r[0]);
    return true;
  }, "structured mesh subdivisions per side");
  cmd->add_option("--nx", [&cfg](const CLI::results_t& r) {
    cfg.mesh_nx = std::stoi(r[0]);
    return true;
  }, "structured mesh subdivisions in x");
  cmd->add_option("--ny", [&cfg](const CLI::results_t& r) {
    cfg.mesh_ny = std::stoi(r[0]);
    return true;
  }, "structured mesh subdivisions in y");
  cmd->add_option("--mesh-file", [&cfg](const CLI::results_t& r) {
    cfg.mesh_file = r[0];
    return true;
  }, "read the (tagged) mesh from a file");
  cmd->add_option("--scheme", cfg.scheme, "time scheme: be, bdf2 or static");
  cmd->add_option("--dt", cfg.dt, "time step");
  cmd->add_option("--T", cfg.t_final, "final time");
  auto opt_double = [cmd](const char* flag, std::optional<double>& slot, const char* help) {
    cmd->add_option(flag, [&slot](const CLI::results_t& r) {
      slot = std::stod(r[0]);
      return true;
    }, help);
  };
  opt_double("--E", cfg.E, "Young's modulus");
  opt_double("--nu", cfg.nu, "Poisson ratio (in (0, 0.5))");
  opt_double("--kappa", cfg.kappa, "permeability");
  opt_double("--alpha", cfg.alpha, "Biot-Willis constant");
  opt_double("--c0", cfg.c0, "specific storage coefficient");
  opt_double("--beta", cfg.beta, "interior penalty (default 4 k^2)");
  cmd->add_option("--output-dir", cfg.output_dir, "output directory");
  cmd->add_flag("--no-vtk", [&cfg](std::int64_t) { cfg.export_vtk = false; },
                "disable VTK exports");
  cmd->add_flag("--no-csv", [&cfg](std::int64_t) { cfg.export_csv = false; },
                "disable CSV exports");
  cmd->add_flag("--checkpoints", cfg.export_checkpoints, "write checkpoints");
  cmd->add_option("--every", cfg.export_every, "export every N steps");
  cmd->add_option("--seed", cfg.seed, "seed for the property samplers");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(porohdg::version_string) +
               " - HDG / EDG-HDG solver for quasi-static poroelasticity in "
               "total-pressure form"};
  app.require_subcommand(1);

  RunConfig cfg_solve, cfg_conv, cfg_verify;
  std::string config_solve, config_conv, config_verify;
  std::string gates;

  CLI::App* solve = app.add_subcommand("solve", "run one case and export fields");
  add_common_options(solve, cfg_solve, config_solve);

  CLI::App* conv =
      app.add_subcommand("convergence", "manufactured-solution refinement study");
  add_common_options(conv, cfg_conv, config_conv);
  conv->add_option("--levels", cfg_conv.levels, "number of refinement levels (>= 2)");
  conv->add_option("--level-offset", cfg_conv.level_offset, "first refinement level");
  conv->add_option("--gate-rates", gates,
                   "comma-separated rate gates for (u, pT, z, p); nonzero exit on miss");

  CLI::App* verify = app.add_subcommand("verify", "run the stability property suite");
  add_common_options(verify, cfg_verify, config_verify);

  CLI11_PARSE(app, argc, argv);

  try {
    auto merge_config = [](RunConfig& cfg, const std::string& path) {
      if (path.empty()) return;
      // flags win: the file only fills fields still at their defaults
      RunConfig file_cfg = porohdg::cli::parse_config_file(path);
      RunConfig defaults;
      auto keep = [&](auto RunConfig::*member) {
        if (cfg.*member == defaults.*member) cfg.*member = file_cfg.*member;
      };
      keep(&RunConfig::case_name);
      keep(&RunConfig::variant);
      keep(&RunConfig::k);
      keep(&RunConfig::scheme);
      keep(&RunConfig::dt);
      keep(&RunConfig::t_final);
      keep(&RunConfig::output_dir);
      keep(&RunConfig::export_vtk);
      keep(&RunConfig::export_csv);
      keep(&RunConfig::export_checkpoints);
      keep(&RunConfig::export_every);
      keep(&RunConfig::seed);
      keep(&RunConfig::levels);
      keep(&RunConfig::level_offset);
      keep(&RunConfig::mesh_n);
      keep(&RunConfig::mesh_nx);
      keep(&RunConfig::mesh_ny);
      keep(&RunConfig::mesh_file);
      keep(&RunConfig::E);
      keep(&RunConfig::nu);
      keep(&RunConfig::kappa);
      keep(&RunConfig::alpha);
      keep(&RunConfig::c0);
      keep(&RunConfig::beta);
      keep(&RunConfig::gate_rates);
    };

    if (solve->parsed()) {
      merge_config(cfg_solve, config_solve);
      return porohdg::cli::cmd_solve(cfg_solve);
    }
    if (conv->parsed()) {
      merge_config(cfg_conv, config_conv);
      if (!gates.empty()) {
        std::array<double, 4> g{};
        std::size_t pos = 0;
        int i = 0;
        std::string rest = gates;
        while (i < 4 && !rest.empty()) {
          g[i++] = std::stod(rest, &pos);
          rest = pos < rest.size() && rest[pos] == ',' ? rest.substr(pos + 1) : "";
        }
        if (i != 4) throw std::invalid_argument("--gate-rates needs 4 values");
        cfg_conv.gate_rates = g;
      }
      return porohdg::cli::cmd_convergence(cfg_conv);
    }
    merge_config(cfg_verify, config_verify);
    return porohdg::cli::cmd_verify(cfg_verify);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 2;
  }
}
