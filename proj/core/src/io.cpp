#include "rotshock/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rotshock/error.hpp"
#include "rotshock/thermo.hpp"

namespace rotshock {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) s += ',';
    s += header[k];
  }
  s += '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) s += ',';
      s += format_double(r[k]);
    }
    s += '\n';
  }
  write_text(path, s);
}

void write_background_csv(const std::filesystem::path& path, const BackgroundSolution& bg) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < bg.grid_x2.size(); ++k) {
    const GasState l{bg.rho_m[k], bg.u_m[k], 0.0, bg.P_m[k]};
    const GasState r{bg.rho_p[k], bg.u_p[k], 0.0, bg.P_p[k]};
    const auto j = rh_residual(l, r, bg.gas);
    rows.push_back({bg.grid_x2[k], bg.d[k], bg.rho_m[k], bg.u_m[k], bg.P_m[k], bg.S_m[k],
                    bg.B_m[k], bg.rho_p[k], bg.u_p[k], bg.P_p[k], bg.S_p[k], bg.B_p[k], j.mass,
                    j.momentum, j.bernoulli});
  }
  write_csv(path,
            {"x2", "inv_mach2", "rho_minus", "u_minus", "P_minus", "S_minus", "B_minus",
             "rho_plus", "u_plus", "P_plus", "S_plus", "B_plus", "jump_mass", "jump_momentum",
             "jump_bernoulli"},
            rows);
}

void write_supersonic_csv(const std::filesystem::path& path, const SupersonicSolution& sup) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < sup.nx; ++i) {
    for (int j = 0; j < sup.M; ++j) {
      rows.push_back({i * sup.h1(), sup.y2_half(j), sup.u1(i, j),
                      0.5 * (sup.u2(i, j) + sup.u2(i, j + 1)), sup.S(j), sup.B(j)});
    }
  }
  write_csv(path, {"y1", "y2", "u1", "u2", "S", "B"}, rows);
}

void write_subsonic_csv(const std::filesystem::path& path, const Problem& pr,
                        const SubsonicColumns& cols, const IterationState& s) {
  const int N = s.grid.N, M = s.grid.M;
  const auto map = fix_coordinates(s.front(pr.m_bar()), pr.geo.L);
  const Eigen::MatrixXd X = eulerian_heights(pr, cols, s);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= N; ++i) {
    const double z1 = s.grid.z1(i);
    for (int j = 0; j < M; ++j) {
      const double y2 = (j + 0.5) * s.grid.h2();
      double u2;
      if (i > 0 && i < N) {
        u2 = 0.25 * (s.U2(i - 1, j) + s.U2(i, j) + s.U2(i - 1, j + 1) + s.U2(i, j + 1));
      } else {
        // Three-point extrapolation to the front or the exit.
        const int a = i == 0 ? 0 : N - 1, b = i == 0 ? 1 : N - 2, c = i == 0 ? 2 : N - 3;
        const auto ex = [&](int jj) {
          return (15.0 * s.U2(a, jj) - 10.0 * s.U2(b, jj) + 3.0 * s.U2(c, jj)) / 8.0;
        };
        u2 = 0.5 * (ex(j) + ex(j + 1));
      }
      const double u1 = cols.u(j) + s.U1(i, j);
      const double S = cols.S(j) + s.S(j), B = cols.B(j) + s.B(j);
      const double q2 = u1 * u1 + u2 * u2;
      rows.push_back({z1, y2, map.Y1(z1, y2), 0.5 * (X(i, j) + X(i, j + 1)), u1, u2,
                      density(S, B, q2, pr.gas), pressure(S, B, q2, pr.gas), S, B});
    }
  }
  write_csv(path, {"z1", "y2", "y1", "x2", "u1", "u2", "rho", "P", "S", "B"}, rows);
}

void write_front_csv(const std::filesystem::path& path, const ShockFront& f) {
  const Eigen::VectorXd p = f.nodes();
  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= f.M(); ++j) rows.push_back({j * f.h2(), p(j), f.psi_prime(j)});
  write_csv(path, {"y2", "psi", "psi_prime"}, rows);
}

void write_iteration_log(const std::filesystem::path& path,
                         const std::vector<IterationLogEntry>& log) {
  std::vector<std::vector<double>> rows;
  for (const auto& l : log) {
    rows.push_back({static_cast<double>(l.iter), l.update_norm, l.psi_sharp, l.defect, l.kappa});
  }
  write_csv(path, {"iter", "update_norm", "psi_sharp", "defect", "kappa_estimate"}, rows);
}

void write_elliptic_dump(const std::filesystem::path& dir, const DiscreteEllipticProblem& p) {
  const auto& g = p.grid;
  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= g.M; ++j) {
    const double lam1 = j < g.M ? p.lam1(j) : 0.0, lam4 = j < g.M ? p.lam4(j) : 0.0;
    const double h1 = j < g.M ? p.h1(j) : 0.0, h2 = j < g.M ? p.h2(j) : 0.0;
    rows.push_back({g.z2(j), g.z2(j + 0.5), lam1, p.lam2(j), p.lam3(j), lam4, h1, h2});
  }
  write_csv(dir / "elliptic_rows.csv",
            {"y2_node", "y2_half", "lam1", "lam2", "lam3", "lam4", "h1", "h2"}, rows);
  rows.clear();
  for (int i = 0; i < g.N; ++i) rows.push_back({g.z1(i + 0.5), p.h3(i)});
  write_csv(dir / "elliptic_top.csv", {"z1", "h3"}, rows);
  rows.clear();
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.M; ++j) rows.push_back({g.z1(i + 0.5), g.z2(j + 0.5), p.H1(i, j)});
  write_csv(dir / "elliptic_H1.csv", {"z1", "y2", "H1"}, rows);
  rows.clear();
  for (int i = 1; i < g.N; ++i)
    for (int j = 1; j < g.M; ++j) rows.push_back({g.z1(i), g.z2(j), p.H2(i, j)});
  write_csv(dir / "elliptic_H2.csv", {"z1", "y2", "H2"}, rows);
}

namespace {

json matrix(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    a.push_back(r);
  }
  return a;
}

Eigen::MatrixXd matrix(const json& a, int rows, int cols, const char* name) {
  if (!a.is_array() || static_cast<int>(a.size()) != rows) {
    throw Error(ErrorKind::Config, std::string("state file: bad shape for ") + name);
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(a[i].size()) != cols) {
      throw Error(ErrorKind::Config, std::string("state file: bad shape for ") + name);
    }
    for (int j = 0; j < cols; ++j) m(i, j) = a[i][j].get<double>();
  }
  return m;
}

json vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector(const json& a, int n, const char* name) {
  const auto v = a.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != n) {
    throw Error(ErrorKind::Config, std::string("state file: bad length for ") + name);
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

}  // namespace

std::string state_to_json(const IterationState& s, const std::string& config_text) {
  json j;
  j["config"] = json::parse(config_text);
  const auto& g = s.grid;
  j["grid"] = {{"L1", g.L1}, {"L2", g.L2}, {"m_bar", g.m_bar}, {"N", g.N}, {"M", g.M}};
  j["psi_bar"] = s.psi_bar;
  j["psi_sharp"] = s.psi_sharp;
  j["iter"] = s.iter;
  j["update_norm"] = s.update_norm;
  j["U1"] = matrix(s.U1);
  j["U2"] = matrix(s.U2);
  j["S"] = vector(s.S);
  j["B"] = vector(s.B);
  j["psi_prime"] = vector(s.psi_prime);
  return j.dump() + "\n";
}

IterationState state_from_json(const std::string& text, std::string* config_text) {
  IterationState s;
  try {
    const json j = json::parse(text);
    if (config_text) *config_text = j.at("config").dump();
    const auto& g = j.at("grid");
    s.grid = EllipticGrid{g.at("L1").get<double>(), g.at("L2").get<double>(),
                          g.at("m_bar").get<double>(), g.at("N").get<int>(), g.at("M").get<int>()};
    const int N = s.grid.N, M = s.grid.M;
    s.psi_bar = j.at("psi_bar").get<double>();
    s.psi_sharp = j.at("psi_sharp").get<double>();
    s.iter = j.at("iter").get<int>();
    s.update_norm = j.at("update_norm").get<double>();
    s.U1 = matrix(j.at("U1"), N + 1, M, "U1");
    s.U2 = matrix(j.at("U2"), N, M + 1, "U2");
    s.S = vector(j.at("S"), M, "S");
    s.B = vector(j.at("B"), M, "B");
    s.psi_prime = vector(j.at("psi_prime"), M + 1, "psi_prime");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed state file: ") + e.what());
  }
  return s;
}

}  // namespace rotshock
