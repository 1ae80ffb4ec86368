#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotshock/iteration.hpp"
#include "rotshock/problem.hpp"

namespace rotshock {

// A profile given either by ascending polynomial coefficients or by a two-column
// CSV table (path relative to the config file).
struct ProfileSpec {
  std::vector<double> poly;
  std::string table;

  static ProfileSpec polynomial(std::vector<double> c) { return {std::move(c), {}}; }
  Profile build(const std::filesystem::path& base) const;
  bool operator==(const ProfileSpec&) const = default;
};

struct SolverConfig {
  int nx = 129;
  int ny = 65;
  double tol_fp = 1e-10;
  double tol_res = 1e-6;
  int max_iter = 50;
  double defect_tol = 1e-10;
  std::optional<std::pair<double, double>> psi_bracket;
  double bracket_fraction = 0.95;
  double trust_factor = 100.0;
  double psi_bar_unperturbed = 0.5;  // fraction of L used when sigma = 0
  int background_nodes = 1025;
  bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool dump_fields = true;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  int schema = 1;
  double gamma = 1.4;
  double beta = 0.0;
  double L = 1.0;
  double sigma = 0.0;
  ProfileSpec g;
  ProfileSpec u_minus = ProfileSpec::polynomial({2.0});
  double M_top = 2.0;
  double P_top = 1.0;
  ProfileSpec u1_en, u2_en, S_en, B_en, P_ex;
  SolverConfig solver;
  OutputConfig output;
  // Directory table paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text, const std::filesystem::path& base = {});
std::string serialize(const RunConfig& c);

// Sets a value by dotted key path, e.g. "nozzle.sigma" or "perturbation.P_ex"
// (value given as JSON text). Used by the parameter sweep.
RunConfig with_override(const RunConfig& c, const std::string& key, const std::string& json_value);

Problem build_problem(const RunConfig& c);
ShockfitOptions shockfit_options(const RunConfig& c);
RunOptions run_options(const RunConfig& c);

}  // namespace rotshock
