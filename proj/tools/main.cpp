#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rotshock/config.hpp"
#include "rotshock/error.hpp"
#include "rotshock/io.hpp"
#include "rotshock/iteration.hpp"
#include "rotshock/shockfit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rotshock;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<int> grid;
  bool dump_elliptic = false;
};

RunConfig load(const Common& c) {
  RunConfig cfg = parse_config(c.config);
  if (!c.grid.empty()) {
    cfg.solver.nx = c.grid[0];
    cfg.solver.ny = c.grid[1];
  }
  if (!c.out.empty()) cfg.output.dir = c.out;
  return cfg;
}

fs::path out_dir(const RunConfig& c) {
  fs::path d = c.output.dir;
  fs::create_directories(d);
  return d;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_report(const fs::path& dir, const json& j) {
  write_text(dir / "report.json", j.dump(2) + "\n");
}

json selection_json(const ShockSelection& s) {
  return {{"psi_bar", s.psi_bar},
          {"J2", s.J2},
          {"J1_at_psi_bar", s.J1_at_psi_bar},
          {"bracket", {s.bracket.first, s.bracket.second}},
          {"condition", s.condition},
          {"I", s.I},
          {"C_minus", s.C_minus},
          {"frak_F", s.frak_F},
          {"L_star", s.L_star},
          {"J_star", s.J_star},
          {"bracket_admissible", s.bracket_admissible},
          {"root_iterations", s.iterations}};
}

json residual_json(const ResidualReport& r) {
  return {{"pde", r.pde_residual}, {"rh", r.rh_residual}, {"exit", r.exit_residual},
          {"wall", r.wall_residual}, {"defect", r.defect}};
}

IterationState linear_state(const InitialApproximation& ia) {
  IterationState s;
  s.grid = ia.V_plus.grid;
  s.U1 = ia.V_plus.u1;
  s.U2 = ia.V_plus.u2;
  s.S = ia.V_plus.S;
  s.B = ia.V_plus.B;
  s.psi_prime = ia.front.psi_prime;
  s.psi_bar = ia.front.psi_bar;
  return s;
}

int cmd_background(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  const Problem pr = build_problem(cfg);
  const fs::path dir = out_dir(cfg);
  const auto& bg = *pr.bg;
  write_background_csv(dir / "background.csv", bg);
  double mass = 0, mom = 0, ber = 0, min_m = 1e300, max_p = 0;
  for (std::size_t k = 0; k < bg.grid_x2.size(); ++k) {
    const auto j = rh_residual({bg.rho_m[k], bg.u_m[k], 0.0, bg.P_m[k]},
                               {bg.rho_p[k], bg.u_p[k], 0.0, bg.P_p[k]}, bg.gas);
    mass = std::max(mass, std::abs(j.mass));
    mom = std::max(mom, std::abs(j.momentum));
    ber = std::max(ber, std::abs(j.bernoulli));
    min_m = std::min(min_m, 1.0 / bg.d[k]);
    const double c2 = cfg.gamma * bg.P_p[k] / bg.rho_p[k];
    max_p = std::max(max_p, bg.u_p[k] * bg.u_p[k] / c2);
  }
  write_report(dir, {{"command", "background"},
                     {"nodes", bg.grid_x2.size()},
                     {"rh_mass", mass},
                     {"rh_momentum", mom},
                     {"rh_bernoulli", ber},
                     {"min_upstream_mach2", min_m},
                     {"max_downstream_mach2", max_p},
                     {"m", pr.m()},
                     {"m_bar", pr.m_bar()},
                     {"seconds", seconds_since(t0)}});
  std::printf("background: %zu nodes, max R-H residual %.3e\n", bg.grid_x2.size(),
              std::max({mass, mom, ber}));
  return 0;
}

int cmd_initial(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  const Problem pr = build_problem(cfg);
  const fs::path dir = out_dir(cfg);
  const auto opts = shockfit_options(cfg);
  const InitialApproximation ia = initial_approximation(pr, opts);
  if (cfg.output.dump_fields) {
    write_supersonic_csv(dir / "supersonic_linear.csv", *ia.V_minus);
    write_subsonic_csv(dir / "subsonic_linear.csv", pr, ia.cols, linear_state(ia));
    write_front_csv(dir / "front.csv", ia.front);
  }
  if (c.dump_elliptic) {
    const auto d = assemble_linear_subsonic(pr, ia.cols, *ia.V_minus, ia.front.psi_bar,
                                            ia.V_plus.grid.N);
    write_elliptic_dump(dir, d.problem);
  }
  write_report(dir, {{"command", "initial"},
                     {"selection", selection_json(ia.selection)},
                     {"defect", ia.V_plus.defect},
                     {"amplification", ia.amplification},
                     {"seconds", seconds_since(t0)}});
  std::printf("initial: psi_bar = %.12g, J1 - J2 = %.3e\n", ia.selection.psi_bar,
              ia.selection.J1_at_psi_bar - ia.selection.J2);
  return 0;
}

// Residual check shared by solve and verify; returns the exit status.
int check_residuals(const ResidualReport& r, double tol) {
  if (r.pde_residual <= tol && r.rh_residual <= tol) return 0;
  std::fprintf(stderr, "non-convergence: residuals pde %.3e, rh %.3e exceed %.3e\n",
               r.pde_residual, r.rh_residual, tol);
  return exit_code(ErrorKind::NonConvergence);
}

int cmd_solve(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load(c);
  const Problem pr = build_problem(cfg);
  const fs::path dir = out_dir(cfg);
  const RunOptions opts = run_options(cfg);
  const RunResult r = run(pr, opts);
  write_iteration_log(dir / "iterations.csv", r.log);
  write_text(dir / "state.json", state_to_json(r.state, serialize(cfg)));
  if (cfg.output.dump_fields) {
    write_supersonic_csv(dir / "supersonic.csv", *r.supersonic);
    write_subsonic_csv(dir / "subsonic.csv", pr, r.init.cols, r.state);
    write_front_csv(dir / "front.csv", r.front);
  }
  if (c.dump_elliptic) {
    const NonlinearScheme scheme(pr, r.init, r.supersonic, opts.iter);
    write_elliptic_dump(dir, scheme.assemble_step_data(r.state, r.state.psi_sharp).problem);
  }
  write_report(dir, {{"command", "solve"},
                     {"psi_bar", r.front.psi_bar},
                     {"psi_sharp", r.front.psi_sharp},
                     {"C1", r.C1},
                     {"kappa_estimate", r.kappa},
                     {"iterations", r.log.size()},
                     {"final_update", r.state.update_norm},
                     {"residuals", residual_json(r.report)},
                     {"tol_res", cfg.solver.tol_res},
                     {"selection", selection_json(r.init.selection)},
                     {"seconds", seconds_since(t0)}});
  std::printf("solve: %zu iterations, psi_bar = %.12g, psi_sharp = %.6e, pde %.3e, rh %.3e\n",
              r.log.size(), r.front.psi_bar, r.front.psi_sharp, r.report.pde_residual,
              r.report.rh_residual);
  return check_residuals(r.report, cfg.solver.tol_res);
}

int cmd_verify(const Common& c, const std::string& state_path) {
  fs::path sp = state_path;
  if (sp.empty()) {
    if (c.out.empty()) throw Error(ErrorKind::Config, "verify needs --state or --out");
    sp = fs::path(c.out) / "state.json";
  }
  std::string cfg_text;
  const IterationState s = state_from_json(read_text(sp), &cfg_text);
  RunConfig cfg = parse_config_string(cfg_text, c.config.empty() ? sp.parent_path()
                                                                 : fs::path(c.config).parent_path());
  if (!c.out.empty()) cfg.output.dir = c.out;
  const Problem pr = build_problem(cfg);
  const RunOptions opts = run_options(cfg);
  // The scheme needs the same supersonic data the solve used.
  const InitialApproximation ia = initial_approximation(pr, opts.shock);
  if (std::abs(ia.front.psi_bar - s.psi_bar) > 1e-12 * cfg.L) {
    throw Error(ErrorKind::Incompatible, "stored state does not match the configuration",
                ia.front.psi_bar - s.psi_bar);
  }
  auto sup = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, opts.shock.sup));
  const NonlinearScheme scheme(pr, ia, sup, opts.iter);
  const ResidualReport r = scheme.residuals(s);
  const fs::path dir = out_dir(cfg);
  write_report(dir, {{"command", "verify"},
                     {"state", sp.string()},
                     {"residuals", residual_json(r)},
                     {"tol_res", cfg.solver.tol_res}});
  std::printf("verify: pde %.3e, rh %.3e, exit %.3e, wall %.3e\n", r.pde_residual,
              r.rh_residual, r.exit_residual, r.wall_residual);
  return check_residuals(r, cfg.solver.tol_res);
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& values) {
  const RunConfig base = load(c);
  const fs::path dir = out_dir(base);
  std::vector<std::vector<double>> rows;
  int worst = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    RunConfig cfg = with_override(base, param, values[k]);
    cfg.output.dir = (dir / ("run_" + std::to_string(k))).string();
    double psi = NAN, sharp = NAN, pde = NAN, rh = NAN, ex = NAN, wall = NAN, its = 0;
    int status = 0;
    try {
      const Problem pr = build_problem(cfg);
      const RunResult r = run(pr, run_options(cfg));
      const fs::path rd = out_dir(cfg);
      write_iteration_log(rd / "iterations.csv", r.log);
      write_text(rd / "state.json", state_to_json(r.state, serialize(cfg)));
      psi = r.front.psi_bar;
      sharp = r.front.psi_sharp;
      pde = r.report.pde_residual;
      rh = r.report.rh_residual;
      ex = r.report.exit_residual;
      wall = r.report.wall_residual;
      its = static_cast<double>(r.log.size());
      status = check_residuals(r.report, cfg.solver.tol_res);
    } catch (const Error& e) {
      std::fprintf(stderr, "sweep %s=%s: %s: %s\n", param.c_str(), values[k].c_str(),
                   to_string(e.kind()), e.what());
      status = exit_code(e.kind());
    }
    worst = std::max(worst, status);
    double v = NAN;
    try {
      v = std::stod(values[k]);
    } catch (const std::exception&) {
    }
    rows.push_back({static_cast<double>(k), v, psi, sharp, pde, rh, ex, wall, its,
                    static_cast<double>(status)});
  }
  write_csv(dir / "sweep.csv",
            {"run", "value", "psi_bar", "psi_sharp", "pde", "rh", "exit", "wall", "iterations",
             "status"},
            rows);
  std::printf("sweep: %zu runs over %s\n", values.size(), param.c_str());
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transonic shock solver for rotating nozzle flow"};
  app.require_subcommand(1);
  Common c;
  std::string state_path, param;
  std::vector<std::string> values;

  const auto add_common = [&](CLI::App* s, bool config_required) {
    auto* o = s->add_option("--config", c.config, "Run configuration (JSON)");
    if (config_required) o->required()->check(CLI::ExistingFile);
    s->add_option("--out", c.out, "Output directory (overrides output.dir)");
    s->add_option("--grid", c.grid, "Grid override: NX NY")->expected(2);
    s->add_flag("--dump-elliptic", c.dump_elliptic, "Write the discrete elliptic data");
  };
  auto* bg = app.add_subcommand("background", "Build and check the background flow");
  add_common(bg, true);
  auto* ini = app.add_subcommand("initial", "Linear approximation and base shock position");
  add_common(ini, true);
  auto* sol = app.add_subcommand("solve", "Full nonlinear iteration");
  add_common(sol, true);
  auto* ver = app.add_subcommand("verify", "Residuals of a stored solution");
  add_common(ver, false);
  ver->add_option("--state", state_path, "state.json written by solve");
  auto* sw = app.add_subcommand("sweep", "Vary one config key over a list of values");
  add_common(sw, true);
  sw->add_option("--param", param, "Dotted key, e.g. nozzle.sigma")->required();
  sw->add_option("--values", values, "JSON values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*bg) return cmd_background(c);
    if (*ini) return cmd_initial(c);
    if (*sol) return cmd_solve(c);
    if (*ver) return cmd_verify(c, state_path);
    if (*sw) return cmd_sweep(c, param, values);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s [value %.6g]\n", to_string(e.kind()), e.what(),
                 e.value());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
