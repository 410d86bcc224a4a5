// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"
#include "porohdg/analysis.hpp"
#include "porohdg/check.hpp"
#include "porohdg/checkpoint.hpp"
#include "porohdg/timeloop.hpp"
#include "porohdg/version.hpp"
#include "porohdg/vtk.hpp"

namespace porohdg::cli {

using nlohmann::json;

namespace {

std::string canonical_case_name(std::string name) {
  if (name == "static") return "static_mms";
  if (name == "quasistatic") return "quasistatic_mms";
  return name;
}

Variant parse_variant(const std::string& v) {
  if (v == "hdg") return Variant::hdg;
  if (v == "edg-hdg" || v == "edg_hdg") return Variant::edg_hdg;
  POROHDG_REQUIRE(false, "unknown variant '" << v << "' (use hdg or edg-hdg)");
  return Variant::hdg;
}

const char* variant_name(Variant v) { return v == Variant::hdg ? "hdg" : "edg-hdg"; }

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string step_filename(const std::string& dir, const std::string& stem, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_step_%04d.vtk", stem.c_str(), step);
  return dir + "/" + buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  POROHDG_CHECK(out.good(), "cannot open " << path);
  out << content;
  POROHDG_CHECK(out.good(), "write failed for " << path);
}

}  // namespace

PreparedCase prepare(const RunConfig& cfg) {
  PreparedCase pc;
  pc.bc = benchmark_by_name(canonical_case_name(cfg.case_name));

  ModelParams params = pc.bc.params;
  if (cfg.E) params.E = *cfg.E;
  if (cfg.nu) params.nu = *cfg.nu;
  if (cfg.kappa) params.kappa = *cfg.kappa;
  if (cfg.alpha) params.alpha = *cfg.alpha;
  if (cfg.c0) params.c0 = *cfg.c0;
  if (cfg.beta) params.beta = *cfg.beta;
  if (cfg.k > 0) params.k = cfg.k;
  params.validate();
  pc.bc = with_params(pc.bc, params);
  pc.params = params;
  pc.variant = cfg.variant.empty() ? pc.bc.default_variant : parse_variant(cfg.variant);

  if (cfg.mesh_file) {
    pc.mesh = read_mesh_file(*cfg.mesh_file);
  } else if (cfg.mesh_n || cfg.mesh_nx || cfg.mesh_ny) {
    const int nx = cfg.mesh_nx ? *cfg.mesh_nx : (cfg.mesh_n ? *cfg.mesh_n : 0);
    const int ny = cfg.mesh_ny ? *cfg.mesh_ny : nx;
    POROHDG_REQUIRE(nx >= 1 && ny >= 1, "mesh resolution must be at least 1");
    pc.mesh = pc.bc.mesh_at_size(nx, ny);
  } else {
    pc.mesh = pc.bc.mesh_at_level(0);
  }

  pc.is_static = pc.bc.is_static;
  pc.scheme = pc.bc.scheme;
  if (!cfg.scheme.empty()) {
    if (cfg.scheme == "static") {
      POROHDG_REQUIRE(pc.bc.is_static,
                      "scheme 'static' is only valid for the static benchmark");
    } else if (cfg.scheme == "be") {
      pc.scheme = Scheme::backward_euler;
      pc.is_static = false;
    } else if (cfg.scheme == "bdf2") {
      pc.scheme = Scheme::bdf2;
      pc.is_static = false;
    } else {
      POROHDG_REQUIRE(false, "unknown scheme '" << cfg.scheme << "'");
    }
  }

  pc.grid = pc.bc.grid;
  if (cfg.t_final > 0.0) pc.grid.t_final = cfg.t_final;
  if (cfg.dt > 0.0) {
    POROHDG_REQUIRE(pc.grid.t_final > 0.0, "dt given but no final time");
    pc.grid.n_steps = std::max(1, static_cast<int>(std::llround(pc.grid.t_final / cfg.dt)));
  }
  return pc;
}

std::vector<std::pair<double, double>> sample_vertical_line(const Mesh& mesh,
                                                            const DofLayout& layout,
                                                            const SolutionState& state,
                                                            double x0, int n_samples) {
  const TriangleBasis basis(layout.k - 1);
  std::vector<std::pair<double, double>> out;
  out.reserve(n_samples);
  const double tol = 1e-10;
  for (int j = 0; j < n_samples; ++j) {
    const double y = static_cast<double>(j) / (n_samples - 1);
    const Eigen::Vector2d x(x0, y);
    double value = 0.0;
    bool found = false;
    for (int c = 0; c < mesh.n_cells() && !found; ++c) {
      const auto& kc = mesh.cells[c];
      const AffineMap map =
          affine_map(mesh.vertices[kc[0]], mesh.vertices[kc[1]], mesh.vertices[kc[2]]);
      const Eigen::Vector2d r = map.to_reference(x);
      if (r(0) < -tol || r(1) < -tol || r(0) + r(1) > 1.0 + tol) continue;
      Eigen::Matrix<double, 1, 2> pt;
      pt << r(0), r(1);
      const Eigen::MatrixXd v = basis.values(pt);
      const int off = layout.cell_p_offset(c);
      for (int i = 0; i < layout.nkm1; ++i) value += state.p(off + i) * v(0, i);
      found = true;
    }
    POROHDG_CHECK(found, "line sample point (" << x0 << ", " << y << ") not in any cell");
    out.emplace_back(y, value);
  }
  return out;
}

int cmd_solve(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  PreparedCase pc = prepare(cfg);
  const Mesh& mesh = pc.mesh;
  const DofLayout layout = build_layout(mesh, pc.params.k, pc.variant);
  std::filesystem::create_directories(cfg.output_dir);

  json manifest;
  manifest["tool"] = version_string;
  manifest["command"] = "solve";
  manifest["config"] = json::parse(config_to_json(cfg));
  manifest["mesh"] = {{"cells", mesh.n_cells()},
                      {"facets", mesh.n_facets()},
                      {"hash", mesh.content_hash()},
                      {"h_max", mesh.max_diameter()}};
  manifest["layout"] = {{"total_dofs", layout.total_dofs()},
                        {"facet_dofs", layout.n_condensed()},
                        {"hash", layout.content_hash()}};
  std::vector<std::string> outputs;

  const auto t_setup = wall_seconds(t0);
  SolutionState final_state;
  std::ofstream energy_csv;
  if (cfg.export_csv) {
    const std::string path = cfg.output_dir + "/energy.csv";
    energy_csv.open(path);
    POROHDG_CHECK(energy_csv.good(), "cannot open " << path);
    energy_csv << "step,time,X,Y\n";
    outputs.push_back(path);
  }
  char buf[256];

  // previous state kept so checkpoints carry the two-level history a BDF2
  // restart needs
  SolutionState last_seen;
  bool have_last = false;
  auto export_state = [&](int step, const SolutionState& s) {
    if (cfg.export_csv) {
      std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e,%.12e\n", step, s.time,
                    energy_x(mesh, layout, pc.params, s),
                    energy_y(mesh, layout, pc.params, s));
      energy_csv << buf;
    }
    if (cfg.export_vtk && step % std::max(1, cfg.export_every) == 0) {
      const std::string path = step_filename(cfg.output_dir, pc.bc.name, step);
      write_vtk(path, mesh, layout, s, pc.bc.name);
      outputs.push_back(path);
    }
    if (cfg.export_checkpoints && step % std::max(1, cfg.export_every) == 0) {
      Checkpoint cp;
      cp.mesh_hash = mesh.content_hash();
      cp.layout_hash = layout.content_hash();
      cp.step = step;
      cp.state = s;
      if (have_last && step >= 1) cp.previous = last_seen;
      std::snprintf(buf, sizeof buf, "%s/checkpoint_%04d.txt", cfg.output_dir.c_str(),
                    step);
      save_checkpoint(buf, cp);
      outputs.push_back(buf);
    }
    last_seen = s;
    have_last = true;
  };

  if (pc.is_static) {
    const CondensedSystem sys(mesh, layout, pc.params, SchemeWeights::static_problem());
    final_state = sys.solve_step(pc.bc.data, 0.0);
    manifest["residual"] = sys.last_residual();
    export_state(0, final_state);
  } else {
    const ExactSolution* exact = pc.bc.exact ? &*pc.bc.exact : nullptr;
    const SolutionState init = initialize(mesh, layout, pc.params, exact);
    std::vector<Observer> observers;
    observers.push_back(export_state);
    final_state =
        run(mesh, layout, pc.params, pc.grid, pc.scheme, pc.bc.data, init, observers);
  }
  const auto t_solve = wall_seconds(t0) - t_setup;

  if (pc.bc.name == "cantilever" && cfg.export_csv) {
    for (double x0 : {0.26, 0.33, 0.40, 0.46}) {
      const auto samples = sample_vertical_line(mesh, layout, final_state, x0, 201);
      std::snprintf(buf, sizeof buf, "%s/line_x%.2f.csv", cfg.output_dir.c_str(), x0);
      std::ofstream line(buf);
      POROHDG_CHECK(line.good(), "cannot open " << buf);
      line << "y,p\n";
      char row[64];
      for (const auto& [y, p] : samples) {
        std::snprintf(row, sizeof row, "%.12e,%.12e\n", y, p);
        line << row;
      }
      outputs.push_back(buf);
    }
  }

  int exit_code = 0;
  if (!final_state.finite()) {
    std::cerr << "solve: non-finite field values in the terminal state\n";
    exit_code = 2;
  }

  manifest["timings"] = {{"setup_seconds", t_setup}, {"solve_seconds", t_solve}};
  manifest["terminal"] = {{"time", final_state.time},
                          {"X", energy_x(mesh, layout, pc.params, final_state)},
                          {"Y", energy_y(mesh, layout, pc.params, final_state)},
                          {"finite", final_state.finite()}};
  manifest["outputs"] = outputs;
  write_text_file(cfg.output_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << "solve: " << pc.bc.name << " (" << variant_name(pc.variant)
            << ", k = " << pc.params.k << ", " << mesh.n_cells() << " cells) done; "
            << "outputs in " << cfg.output_dir << "\n";
  return exit_code;
}

int cmd_convergence(const RunConfig& cfg) {
  POROHDG_REQUIRE(cfg.levels >= 2, "convergence: need at least 2 levels");
  PreparedCase pc = prepare(cfg);
  POROHDG_REQUIRE(pc.bc.exact.has_value(),
                  "convergence: case '" << pc.bc.name << "' has no exact solution");
  if (!cfg.scheme.empty() && !pc.is_static) pc.bc.scheme = pc.scheme;

  StudyOptions opts;
  opts.n_levels = cfg.levels;
  opts.level_offset = cfg.level_offset;
  opts.dt = cfg.dt;
  opts.t_final = cfg.t_final;
  const RateTable table = convergence_study(pc.bc, pc.variant, pc.params.k, opts);

  std::filesystem::create_directories(cfg.output_dir);
  char stem[128];
  std::snprintf(stem, sizeof stem, "%s/convergence_%s_%s_k%d", cfg.output_dir.c_str(),
                pc.bc.name.c_str(), variant_name(pc.variant), pc.params.k);
  write_text_file(std::string(stem) + ".csv", table.csv());
  write_text_file(std::string(stem) + ".txt", table.text());
  std::cout << table.text();

  if (!cfg.gate_rates) return 0;
  const auto& finest = table.rates.back();
  const char* names[4] = {"u", "pT", "z", "p"};
  bool ok = true;
  for (int f = 0; f < 4; ++f) {
    const double gate = (*cfg.gate_rates)[f];
    const bool pass = !std::isnan(finest[f]) && finest[f] >= gate;
    std::printf("gate %-2s: rate %s %.3f (need >= %.3f): %s\n", names[f],
                std::isnan(finest[f]) ? "-" : "=",
                std::isnan(finest[f]) ? 0.0 : finest[f], gate, pass ? "PASS" : "FAIL");
    ok = ok && pass;
  }
  return ok ? 0 : 3;
}

int cmd_verify(const RunConfig& cfg) {
  PreparedCase pc = prepare(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  json report;
  report["tool"] = version_string;
  report["command"] = "verify";
  bool all_ok = true;
  auto record = [&](const std::string& name, bool pass, double measured,
                    const std::string& detail) {
    report["properties"].push_back(
        {{"name", name}, {"pass", pass}, {"measured", measured}, {"detail", detail}});
    std::printf("%-28s %s  (%.3e) %s\n", name.c_str(), pass ? "PASS" : "FAIL", measured,
                detail.c_str());
    all_ok = all_ok && pass;
  };

  // manufactured solutions satisfy the continuous equations
  {
    double worst = 0.0;
    for (double nu : {0.4, 0.49999})
      worst = std::max(worst, residual_check(*static_case(1e4, nu).exact,
                                             static_case(1e4, nu).params, true, 100,
                                             cfg.seed));
    BenchmarkCase qs = quasistatic_case();
    worst = std::max(worst, residual_check(*qs.exact, qs.params, false, 100, cfg.seed));
    record("mms_residual", worst <= 1e-8, worst, "max relative equation residual");
  }

  BenchmarkCase qs = quasistatic_case();
  // zero data gives the zero state
  {
    const Mesh mesh = qs.mesh_at_level(0);
    ModelParams params = qs.params;
    params.k = std::max(1, cfg.k);
    const DofLayout layout = build_layout(mesh, params.k, pc.variant);
    const CondensedSystem sys(mesh, layout, params, SchemeWeights::backward_euler(0.01));
    const SolutionState hist = zero_state(layout);
    const SolutionState s = sys.solve_step(ProblemData{}, 0.01, &hist);
    double worst = 0.0;
    for (const auto* v : {&s.u, &s.pT, &s.z, &s.p, &s.ubar, &s.pTbar, &s.pbar})
      worst = std::max(worst, v->lpNorm<Eigen::Infinity>());
    record("zero_data_uniqueness", worst <= 1e-12, worst, "max |coefficient|");
  }

  // condensation agrees with the monolithic assembly
  {
    double worst = 0.0;
    int combo = 0;
    for (int n : {1, 2}) {
      for (int k : {1, 2}) {
        for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
          const Mesh mesh = qs.mesh_at_size(n, n);
          ModelParams params = qs.params;
          params.k = k;
          const DofLayout layout = build_layout(mesh, k, variant);
          const SchemeWeights w = SchemeWeights::backward_euler(0.05);
          std::mt19937_64 rng(cfg.seed + combo);
          std::uniform_real_distribution<double> unif(-1.0, 1.0);
          SolutionState hist = zero_state(layout);
          for (Eigen::Index i = 0; i < hist.p.size(); ++i) hist.p(i) = unif(rng);
          for (Eigen::Index i = 0; i < hist.pT.size(); ++i) hist.pT(i) = unif(rng);
          const CondensedSystem sys(mesh, layout, params, w);
          const SolutionState a = sys.solve_step(qs.data, 0.05, &hist);
          const SolutionState b =
              solve_step_monolithic(mesh, layout, params, w, qs.data, 0.05, &hist);
          double num = 0.0, den = 0.0;
          num += (a.u - b.u).squaredNorm() + (a.p - b.p).squaredNorm() +
                 (a.pT - b.pT).squaredNorm() + (a.z - b.z).squaredNorm();
          den += b.u.squaredNorm() + b.p.squaredNorm() + b.pT.squaredNorm() +
                 b.z.squaredNorm();
          worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-30));
          ++combo;
        }
      }
    }
    record("condensation_oracle", worst <= 1e-10, worst, "relative state gap");
  }

  // divergence conformity of a solved manufactured step
  {
    double worst = 0.0;
    for (Variant variant : {Variant::hdg, Variant::edg_hdg}) {
      const Mesh mesh = qs.mesh_at_level(1);
      ModelParams params = qs.params;
      params.k = 1;
      const DofLayout layout = build_layout(mesh, 1, variant);
      const SolutionState init = initialize(mesh, layout, params, &*qs.exact);
      const CondensedSystem sys(mesh, layout, params,
                                SchemeWeights::backward_euler(1e-3));
      const SolutionState s = sys.solve_step(qs.data, 1e-3, &init);
      const ConformityReport rep = divergence_conformity_report(mesh, layout, s);
      worst = std::max(worst, rep.max_jump_u_n / std::max(rep.scale_u_n, 1e-30));
      worst = std::max(worst, rep.max_jump_z_n / std::max(rep.scale_z_n, 1e-30));
    }
    record("divergence_conformity", worst <= 1e-10, worst, "relative normal jump");
  }

  // coercivity and inf-sup health on a refinement sequence (n = 1 is
  // degenerate for the EDG displacement trace: every vertex lies on Gamma_D)
  {
    double min_ratio = std::numeric_limits<double>::infinity();
    std::vector<InfSupValues> vals;
    for (int n : {2, 4, 8}) {
      const Mesh mesh = qs.mesh_at_size(n, n);
      ModelParams params = qs.params;
      params.k = std::max(1, cfg.k);
      const DofLayout layout = build_layout(mesh, params.k, pc.variant);
      min_ratio = std::min(min_ratio, coercivity_check(mesh, layout, params).ratio);
      vals.push_back(infsup_estimate(mesh, layout));
    }
    record("coercivity", min_ratio > 0.0, min_ratio, "min a_h(v,v) / (mu |||v|||^2)");
    double min_sigma = std::numeric_limits<double>::infinity();
    for (const auto& v : vals) {
      min_sigma = std::min(min_sigma, v.displacement_pressure);
      min_sigma = std::min(min_sigma, v.velocity_pressure);
    }
    const double trend1 = vals.back().displacement_pressure / vals.front().displacement_pressure;
    const double trend2 = vals.back().velocity_pressure / vals.front().velocity_pressure;
    record("infsup_positive", min_sigma > 0.0, min_sigma, "min singular value");
    record("infsup_stable", trend1 >= 0.5 && trend2 >= 0.5, std::min(trend1, trend2),
           "finest / coarsest ratio");
  }

  // unforced backward Euler decay
  {
    const Mesh mesh = qs.mesh_at_size(4, 4);
    ModelParams params = qs.params;
    params.k = 1;
    const DofLayout layout = build_layout(mesh, 1, pc.variant);
    ProblemData forcing;
    forcing.source = [](const Eigen::Vector2d& x, double) {
      return std::sin(2.0 * x(0)) + x(1);
    };
    const CondensedSystem prep(mesh, layout, params, SchemeWeights::static_problem());
    const SolutionState initial = prep.solve_step(forcing, 0.0);
    std::vector<double> xs;
    std::vector<Observer> obs;
    obs.push_back([&](int, const SolutionState& s) {
      xs.push_back(energy_x(mesh, layout, params, s));
    });
    run(mesh, layout, params, TimeGrid{0.2, 20}, Scheme::backward_euler, ProblemData{},
        initial, obs);
    double worst = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      worst = std::max(worst, (xs[i] - xs[i - 1]) / std::max(xs[i - 1], 1e-30));
    record("energy_decay", worst <= 1e-12, worst, "max relative energy increase");
  }

  report["all_pass"] = all_ok;
  write_text_file(cfg.output_dir + "/verify_report.json", report.dump(2) + "\n");
  return all_ok ? 0 : 3;
}

}  // namespace porohdg::cli
