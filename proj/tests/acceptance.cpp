// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "manufactured.hpp"
#include "rotshock/background.hpp"
#include "rotshock/elliptic.hpp"
#include "rotshock/error.hpp"
#include "rotshock/iteration.hpp"
#include "rotshock/shockfit.hpp"
#include "rotshock/supersonic.hpp"

using namespace rotshock;

namespace {

// Tolerances, pinned.
constexpr double kOracleTol = 1e-12;
constexpr double kOracleSeconds = 1.0;
constexpr double kMachTol = 1e-10;
constexpr double kRhTol = 1e-10;
constexpr double kRatioLo = 3.5, kRatioHi = 4.5;
constexpr double kTelescopeTol = 1e-12;
constexpr double kFluxStability = 1.25;  // max/min of violation / h^2 across grids
constexpr double kFlatTol = 1e-10;
constexpr double kRootTol = 1e-10;
constexpr int kMaxIter = 20;
constexpr double kKappaMax = 0.5;
constexpr double kResidualTol = 1e-6;
constexpr double kSharpFactor = 10.0;
constexpr double kRunSeconds = 300.0;
constexpr double kScalingSpread = 0.10;
constexpr double kSlopeLo = 1.8, kSlopeHi = 2.2;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& what) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Upstream u = 2 + 0.1 x^2 with beta = 0.1, shared by criteria 5 to 7.
Problem rotating(double sigma, const Perturbation& p) {
  GasModel gas{1.4, 0.1};
  UpstreamSpec up;
  up.u_minus = Profile::poly({2.0, 0.0, 0.1});
  Geometry geo;
  geo.sigma = sigma;
  return Problem::build(gas, up, geo, p, 1025);
}

Perturbation iteration_data() {
  Perturbation p;
  p.u2_en = Profile::poly({0.0, 1.0, -1.0});
  p.S_en = Profile::poly({0.0, 0.2});
  p.P_ex = Profile::poly({-1.148485298});
  return p;
}

RunOptions iteration_options() {
  RunOptions o;
  o.shock.sup.nx = 129;
  o.shock.sup.ny = 65;
  o.shock.bracket = std::make_pair(0.2, 0.7);
  return o;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  UpstreamSpec up;
  up.u_minus = Profile::constant(2.0);
  const auto bg = build_background(up, GasModel{1.4, 0.0}, 1025);
  const double dt = seconds(t0);
  double err = 0.0;
  for (std::size_t k = 0; k < bg.grid_x2.size(); ++k) {
    err = std::max({err, std::abs(bg.u_p[k] - 0.75), std::abs(bg.P_p[k] - 4.5),
                    std::abs(bg.rho_p[k] - 56.0 / 15.0)});
  }
  report("1", err <= kOracleTol && dt < kOracleSeconds,
         fmt("background oracle: max error %.2e (tol %.0e), %.3f s (limit %.0f s)", err,
             kOracleTol, dt, kOracleSeconds));
}

void criterion2() {
  const GasModel gas{1.4, 0.1};
  UpstreamSpec up;
  up.u_minus = Profile::constant(2.0);
  const auto bg = build_background(up, gas, 1025);
  const double d1 = bg.d.back();
  double err = 0.0;
  for (std::size_t k = 0; k < bg.grid_x2.size(); ++k) {
    const double x = bg.grid_x2[k];
    const double exact = 1.0 + (d1 - 1.0) * std::exp(-gas.beta * gas.gamma * (1.0 - x) / 2.0);
    err = std::max(err, std::abs(bg.d[k] - exact));
  }
  UpstreamSpec up2;
  up2.u_minus = Profile::poly({2.0, 0.0, 0.1});
  const auto bg2 = build_background(up2, gas, 1025);
  double rh = 0.0;
  for (std::size_t k = 0; k < bg2.grid_x2.size(); ++k) {
    const auto j = rh_residual({bg2.rho_m[k], bg2.u_m[k], 0.0, bg2.P_m[k]},
                               {bg2.rho_p[k], bg2.u_p[k], 0.0, bg2.P_p[k]}, gas);
    rh = std::max({rh, std::abs(j.mass), std::abs(j.momentum), std::abs(j.bernoulli)});
  }
  report("2", err <= kMachTol && rh <= kRhTol,
         fmt("Mach profile vs closed form %.2e (tol %.0e); R-H residual %.2e (tol %.0e)", err,
             kMachTol, rh, kRhTol));
}

double manufactured_error(int n) {
  EllipticOptions o;
  o.project = true;
  return manufactured::max_error(solve(manufactured::problem(), n, n, o));
}

void criterion3() {
  const double e64 = manufactured_error(64), e128 = manufactured_error(128);
  const double ratio = e64 / e128;

  // Telescoping: the cell sum of the first residual equals the defect for any
  // field carrying the boundary data.
  auto p = manufactured::problem().discretize(40, 30);
  Eigen::MatrixXd v1 = Eigen::MatrixXd::Random(41, 30), v2 = Eigen::MatrixXd::Random(40, 31);
  v1.row(0) = p.h1.transpose();
  v1.row(40) = p.h2.transpose();
  v2.col(0).setZero();
  v2.col(30) = p.h3;
  Eigen::MatrixXd r1;
  elliptic_residuals(p, v1, v2, &r1, nullptr);
  const auto& g = p.grid;
  const double tele = std::abs(r1.sum() * g.h1() * g.h2() - compatibility_defect(p));

  // Incompatible data: shift h2 by a constant and expect the exact defect back.
  auto q = manufactured::problem().discretize(32, 32);
  q.h2.array() += 0.01;
  const double expect = compatibility_defect(q);
  bool rejected = false;
  double got = 0.0;
  try {
    solve(q, EllipticOptions{});
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::Incompatible;
    got = e.value();
  }
  const bool ok = ratio >= kRatioLo && ratio <= kRatioHi && tele <= kTelescopeTol && rejected &&
                  std::abs(got - expect) <= 1e-15 * (1.0 + std::abs(expect));
  report("3", ok,
         fmt("elliptic: error ratio 64->128 cells %.3f (in [3.5, 4.5]); telescoping %.1e (tol "
             "%.0e); ",
             ratio, tele, kTelescopeTol) +
             (rejected ? fmt("incompatible data rejected, defect %.6e reported %.6e", expect, got)
                       : std::string("incompatible data NOT rejected")));
}

void criterion4() {
  const std::vector<Perturbation> sets = [] {
    std::vector<Perturbation> v(3);
    v[0].u1_en = Profile::poly({0.3, 0.2});
    v[0].u2_en = Profile::poly({0.0, 1.0, -1.0});
    v[0].S_en = Profile::poly({0.1, 0.0, 0.2});
    v[0].B_en = Profile::poly({0.2, -0.1});
    v[1].u1_en = Profile::poly({-0.5, 0.0, 1.0});
    v[1].u2_en = Profile::poly({0.0, -2.0, 2.0});
    v[2].u1_en = Profile::poly({0.0, 0.0, -0.4, 0.3});
    v[2].u2_en = Profile::poly({0.0, 0.5, 0.5, -1.0});
    v[2].S_en = Profile::poly({0.0, 0.3});
    return v;
  }();
  const std::vector<std::vector<double>> walls = {{0, 0, 0, 0, 1.0}, {0, 0, 0, 0, 0, -0.8}, {0, 0, 0, 0, 0.5, -0.3}};
  std::string msg = "flux identity C = viol/(sigma h^2):";
  bool ok = true;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    GasModel gas{1.4, 0.1};
    UpstreamSpec up;
    up.u_minus = Profile::poly({2.0, 0.0, 0.1});
    Geometry geo;
    geo.sigma = 1e-3;
    geo.g = Profile::poly(walls[k]);
    const Problem pr = Problem::build(gas, up, geo, sets[k], 513);
    std::vector<double> C;
    for (int r : {1, 2, 4}) {
      SupersonicOptions o;
      o.nx = 32 * r + 1;
      o.ny = 16 * r + 1;
      const auto lin = solve_linear(pr, o);
      const auto fr = flux_identity(pr, lin);
      const double h2 = lin.h2();
      C.push_back(fr.max_violation / (h2 * h2 * pr.sigma()));
    }
    const double lo = *std::min_element(C.begin(), C.end());
    const double hi = *std::max_element(C.begin(), C.end());
    ok = ok && lo > 0.0 && hi / lo <= kFluxStability;
    msg += fmt(" set%.0f [%.3e %.3e %.3e]", static_cast<double>(k + 1), C[0], C[1], C[2]);
  }
  report("4", ok, msg + fmt(" (max/min <= %.2f)", kFluxStability));
}

void criterion5() {
  // (a) beta = 0, flat nozzle: J1 does not depend on the position.
  {
    GasModel gas{1.4, 0.0};
    UpstreamSpec up;
    up.u_minus = Profile::constant(2.0);
    Geometry geo;
    geo.sigma = 1e-3;
    Perturbation p;
    p.u1_en = Profile::poly({0.3, 0.2});
    p.u2_en = Profile::poly({0.0, 1.0, -1.0});
    p.S_en = Profile::poly({0.1, 0.0, 0.2});
    p.P_ex = Profile::poly({0.5});
    const Problem pr = Problem::build(gas, up, geo, p, 1025);
    SupersonicOptions so;
    auto lin = std::make_shared<SupersonicSolution>(solve_linear(pr, so));
    const auto cols = subsonic_columns(pr, lin->M);
    const JFunctionals J(pr, cols, lin);
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 64; ++k) {
      const double v = J.J1(k / 64.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    report("5a", hi - lo <= kFlatTol,
           fmt("beta = 0: J1 spread over [0, L] %.2e (tol %.0e)", hi - lo, kFlatTol));
  }
  // (b) beta = 0.1 with data inside the monotonicity bracket.
  {
    Perturbation p;
    p.u2_en = Profile::poly({0.0, 1.0, -1.0});
    p.P_ex = Profile::poly({0.000477096110759});
    const Problem pr = rotating(1e-3, p);
    ShockfitOptions o;
    auto lin = std::make_shared<SupersonicSolution>(solve_linear(pr, o.sup));
    const auto cols = subsonic_columns(pr, lin->M);
    const JFunctionals J(pr, cols, lin);
    bool ok = false;
    std::string msg;
    try {
      const auto sel = find_shock_position(pr, J, *lin, o);
      const double res = std::abs(sel.J1_at_psi_bar - sel.J2);
      ok = sel.bracket_admissible && res <= kRootTol && sel.psi_bar > sel.bracket.first &&
           sel.psi_bar < sel.bracket.second;
      msg = fmt("beta = 0.1: psi_bar %.6f in bracket [%.3g, %.4f], |J1 - J2| %.1e", sel.psi_bar,
                sel.bracket.first, sel.bracket.second, res) +
            fmt(", admissible %.0f", sel.bracket_admissible ? 1.0 : 0.0);
    } catch (const Error& e) {
      msg = std::string("beta = 0.1: ") + e.what();
    }
    report("5b", ok, msg);
  }
}

double total_norm(const IterationState& s) {
  return std::max({s.U1.cwiseAbs().maxCoeff(), s.U2.cwiseAbs().maxCoeff(),
                   s.S.cwiseAbs().maxCoeff(), s.psi_prime.cwiseAbs().maxCoeff(),
                   std::abs(s.psi_sharp)});
}

struct IterationRun {
  RunResult r;
  double kappa = 0.0;
  double C1 = 0.0;  // |psi_sharp| / sigma after the first application of T
  double seconds = 0.0;
};

IterationRun iterate(double sigma) {
  const Problem pr = rotating(sigma, iteration_data());
  const RunOptions o = iteration_options();
  IterationRun out;
  const auto t0 = std::chrono::steady_clock::now();
  out.r = run(pr, o);
  out.seconds = seconds(t0);
  const NonlinearScheme scheme(pr, out.r.init, out.r.supersonic, o.iter);
  out.kappa = measure_contraction(scheme, out.r.state, sigma * sigma);
  out.C1 = std::abs(scheme.apply_T(scheme.initial_state()).psi_sharp) / sigma;
  return out;
}

void criterion6_7() {
  IterationRun r3, r4, r2;
  try {
    r3 = iterate(1e-3);
    r4 = iterate(1e-4);
    r2 = iterate(1e-2);
  } catch (const Error& e) {
    report("6", false, std::string("iteration failed: ") + e.what());
    report("7a", false, "not measured");
    return;
  }
  const auto& rep = r3.r.report;
  const int iters = static_cast<int>(r3.r.log.size());
  const double res = rep.pde_residual + rep.rh_residual;
  const double sharp = std::abs(r3.r.state.psi_sharp);
  const bool ok6 = iters <= kMaxIter && r3.kappa <= kKappaMax && r4.kappa < r3.kappa &&
                   res <= kResidualTol && sharp <= kSharpFactor * 1e-3 * r3.C1 &&
                   r3.seconds <= kRunSeconds;
  report("6", ok6,
         fmt("iteration sigma=1e-3 on 129x65: %.0f iterations (max 20), kappa %.2e, kappa(1e-4) "
             "%.2e",
             iters, r3.kappa, r4.kappa) +
             fmt(", pde+rh %.1e (tol %.0e), |psi_sharp| %.3e <= %.3e", res, kResidualTol, sharp,
                 kSharpFactor * 1e-3 * r3.C1) +
             fmt(", %.2f s", r3.seconds));

  const double n2 = total_norm(r2.r.state) / 1e-2, n3 = total_norm(r3.r.state) / 1e-3;
  const double spread = std::abs(n2 - n3) / std::max(n2, n3);
  report("7a", spread <= kScalingSpread,
         fmt("norm/sigma: %.5f (1e-2), %.5f (1e-3), spread %.2f%% (max 10%%)", n2, n3,
             100 * spread));
}

// Distance of (nonlinear - background) from the linear solution at one sigma.
double supersonic_gap(double sigma, const Perturbation& p) {
  SupersonicOptions o;
  o.nx = 65;
  o.ny = 33;
  const Problem pr = rotating(sigma, p);
  const Problem p0 = rotating(0.0, p);
  const auto lin = solve_linear(pr, o);
  const auto nl = solve_nonlinear(pr, o);
  const auto bg = solve_nonlinear(p0, o);
  double e = 0.0;
  for (int i = 0; i < o.nx; ++i) {
    for (int j = 0; j < lin.M; ++j)
      e = std::max(e, std::abs(nl.u1(i, j) - bg.u1(i, j) - lin.u1(i, j)));
    for (int j = 0; j <= lin.M; ++j)
      e = std::max(e, std::abs(nl.u2(i, j) - bg.u2(i, j) - lin.u2(i, j)));
  }
  return e;
}

void criterion7b() {
  Perturbation p;
  p.u1_en = Profile::poly({0.3, 0.2});
  p.u2_en = Profile::poly({0.0, 1.0, -1.0});
  p.S_en = Profile::poly({0.1, 0.0, 0.2});
  p.B_en = Profile::poly({0.2, -0.1});
  const double a = supersonic_gap(1e-2, p), b = supersonic_gap(1e-3, p);
  const double slope = std::log10(a / b);
  report("7b", slope >= kSlopeLo && slope <= kSlopeHi,
         fmt("|(nonlinear - background) - linear|: %.3e (1e-2), %.3e (1e-3), slope %.3f (in "
             "[1.8, 2.2])",
             a, b, slope));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6_7();
  criterion7b();
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
