#include "rotshock/supersonic.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

namespace {

using Vec = Eigen::VectorXd;

// Background values on the marching grid, computed from (S, B, u) through the
// same thermodynamics as the nonlinear scheme so that it is an exact steady state.
struct Columns {
  int M;
  double h2;
  Vec u_half, rho_half, P_half, S_half, B_half, c2_half;
  Vec u_node;
};

Columns background_columns(const Problem& pr, int M) {
  Columns c;
  c.M = M;
  c.h2 = pr.m_bar() / M;
  c.u_half.resize(M);
  c.rho_half.resize(M);
  c.P_half.resize(M);
  c.S_half.resize(M);
  c.B_half.resize(M);
  c.c2_half.resize(M);
  c.u_node.resize(M + 1);
  for (int j = 0; j < M; ++j) {
    const auto p = pr.hb->minus((j + 0.5) * c.h2);
    c.u_half(j) = p.u;
    c.S_half(j) = p.S;
    c.B_half(j) = p.B;
    c.rho_half(j) = density(p.S, p.B, p.u * p.u, pr.gas);
    c.P_half(j) = pressure(p.S, p.B, p.u * p.u, pr.gas);
    c.c2_half(j) = pr.gas.gamma * c.P_half(j) / c.rho_half(j);
  }
  for (int j = 0; j <= M; ++j) c.u_node(j) = pr.hb->minus(j * c.h2).u;
  return c;
}

int pick_substeps(const Problem& pr, const Columns& c, double h1, const SupersonicOptions& o,
                  double margin) {
  double smax = 0.0;
  for (int j = 0; j < c.M; ++j) {
    const double M2 = c.u_half(j) * c.u_half(j) / c.c2_half(j);
    const double s = (pr.m_bar() / pr.m()) * c.rho_half(j) * c.u_half(j) / std::sqrt(M2 - 1.0);
    smax = std::max(smax, s);
  }
  smax *= margin;
  const double kmax = o.cfl * std::sqrt(2.0) * c.h2 / smax;
  const int need = std::max(1, static_cast<int>(std::ceil(h1 / kmax - 1e-12)));
  if (o.substeps > 0) {
    if (o.substeps < need) {
      std::ostringstream os;
      os << "y1 step " << h1 / o.substeps << " exceeds the characteristic bound " << kmax
         << "; refine y1 or allow " << need << " substeps";
      throw Error(ErrorKind::Cfl, os.str(), h1 / o.substeps);
    }
    return o.substeps;
  }
  return need;
}

void rk4(const std::function<Vec(double, const Vec&)>& f, double t, double k, Vec& y) {
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + 0.5 * k, y + 0.5 * k * k1);
  const Vec k3 = f(t + 0.5 * k, y + 0.5 * k * k2);
  const Vec k4 = f(t + k, y + k * k3);
  y += (k / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Upper-node value of a half-row perturbation by quadratic extrapolation.
double extrap_top(const Vec& d, int M) {
  return (15.0 * d(M - 1) - 10.0 * d(M - 2) + 3.0 * d(M - 3)) / 8.0;
}

// u1 on the supersonic branch with 1/(rho u1) = q.
double recover_u1(double q, double S, double B, double u2sq, double guess, const GasModel& gas,
                  double tol) {
  double u = guess;
  for (int it = 0; it < 60; ++it) {
    const double q2 = u * u + u2sq;
    const double rho = density(S, B, q2, gas);
    const double P = pressure(S, B, q2, gas);
    const double c2 = gas.gamma * P / rho;
    const double f = rho * u - 1.0 / q;
    const double df = rho * (1.0 - u * u / c2);
    if (!(df < 0.0)) {
      throw Error(ErrorKind::NotSupersonic, "supersonic march lost supersonicity",
                  std::sqrt(q2 / c2));
    }
    const double du = -f / df;
    u += du;
    if (std::abs(du) <= tol * std::abs(u)) return u;
  }
  throw Error(ErrorKind::NonConvergence, "velocity recovery did not converge", u);
}

double interp_col(const Eigen::MatrixXd& A, int col, double y1, double h1, bool deriv) {
  const int n = static_cast<int>(A.rows());
  std::vector<double> tmp;
  double w[4], dw[4];
  const std::size_t k = lagrange4_weights(static_cast<std::size_t>(n), 0.0, h1, y1, w, dw);
  const double* c = deriv ? dw : w;
  double s = 0.0;
  for (int a = 0; a < 4; ++a) s += c[a] * A(static_cast<Eigen::Index>(k) + a, col);
  return s;
}

}  // namespace

double SupersonicSolution::u1_at(double y1, int j) const { return interp_col(u1, j, y1, h1(), false); }
double SupersonicSolution::u2_at(double y1, int j) const { return interp_col(u2, j, y1, h1(), false); }
double SupersonicSolution::du1_at(double y1, int j) const { return interp_col(u1, j, y1, h1(), true); }
double SupersonicSolution::du2_at(double y1, int j) const { return interp_col(u2, j, y1, h1(), true); }

void transport_SB(const Problem& pr, int M, bool linear, Eigen::VectorXd& S, Eigen::VectorXd& B) {
  const double h2 = pr.m_bar() / M;
  const double s = pr.sigma();
  S.resize(M);
  B.resize(M);
  for (int j = 0; j < M; ++j) {
    const double y = (j + 0.5) * h2;
    const auto en = pr.inflow_pert(y, linear);
    if (linear) {
      S(j) = s * en.S;
      B(j) = s * en.B;
    } else {
      const auto p = pr.hb->minus(y);
      S(j) = p.S + s * en.S;
      B(j) = p.B + s * en.B;
    }
  }
}

SupersonicSolution solve_linear(const Problem& pr, const SupersonicOptions& o) {
  if (o.nx < 4 || o.ny < 5) throw Error(ErrorKind::Precondition, "supersonic grid too small");
  const int M = o.ny - 1;
  const Columns c = background_columns(pr, M);
  const double g = pr.gas.gamma, s = pr.sigma();
  SupersonicSolution sol;
  sol.kind = SolveKind::Linear;
  sol.nx = o.nx;
  sol.M = M;
  sol.L = pr.geo.L;
  sol.m_bar = pr.m_bar();
  sol.m = pr.m();
  const double h1 = sol.h1(), h2 = c.h2;
  sol.substeps = pick_substeps(pr, c, h1, o, 1.0);
  transport_SB(pr, M, true, sol.S, sol.B);
  sol.u1.setZero(o.nx, M);
  sol.u2.setZero(o.nx, M + 1);

  Vec A(M), Pb(M);
  for (int j = 0; j < M; ++j) {
    const double M2 = c.u_half(j) * c.u_half(j) / c.c2_half(j);
    A(j) = c.rho_half(j) * c.u_half(j) * c.u_half(j) / (M2 - 1.0);
    // pressure perturbation pieces that do not change along y1
    Pb(j) = c.rho_half(j) * sol.B(j) - c.P_half(j) * sol.S(j) / (g - 1.0);
  }
  const double mu = pr.mu_dot;
  const auto& geo = pr.geo;

  // State: du1 (M half rows) followed by du2 at interior nodes (M - 1).
  const auto rhs = [&](double t, const Vec& y) {
    Vec f(2 * M - 1);
    Vec w(M + 1);
    w(0) = 0.0;
    w(M) = s * geo.g.prime(t);
    for (int j = 1; j < M; ++j) w(j) = y(M + j - 1) / c.u_node(j);
    for (int j = 0; j < M; ++j) f(j) = A(j) * (w(j + 1) - w(j)) / h2;
    for (int j = 1; j < M; ++j) {
      const double dPn = Pb(j) - c.rho_half(j) * c.u_half(j) * y(j);
      const double dPs = Pb(j - 1) - c.rho_half(j - 1) * c.u_half(j - 1) * y(j - 1);
      f(M + j - 1) = -(dPn - dPs) / h2 - mu * (c.P_half(j) - c.P_half(j - 1)) / h2;
    }
    return f;
  };

  Vec y(2 * M - 1);
  for (int j = 0; j < M; ++j) y(j) = s * pr.inflow_pert((j + 0.5) * h2, true).u1;
  for (int j = 1; j < M; ++j) y(M + j - 1) = s * pr.inflow_pert(j * h2, true).u2;
  const auto store = [&](int i, double t) {
    for (int j = 0; j < M; ++j) sol.u1(i, j) = y(j);
    sol.u2(i, 0) = 0.0;
    for (int j = 1; j < M; ++j) sol.u2(i, j) = y(M + j - 1);
    sol.u2(i, M) = s * c.u_node(M) * geo.g.prime(t);
  };
  store(0, 0.0);
  const double k = h1 / sol.substeps;
  for (int i = 0; i + 1 < o.nx; ++i) {
    for (int n = 0; n < sol.substeps; ++n) rk4(rhs, i * h1 + n * k, k, y);
    store(i + 1, (i + 1) * h1);
  }
  return sol;
}

SupersonicSolution solve_nonlinear(const Problem& pr, const SupersonicOptions& o) {
  if (o.nx < 4 || o.ny < 5) throw Error(ErrorKind::Precondition, "supersonic grid too small");
  const int M = o.ny - 1;
  const Columns c = background_columns(pr, M);
  const GasModel& gas = pr.gas;
  const double s = pr.sigma();
  const double ratio = pr.m_bar() / pr.m();
  SupersonicSolution sol;
  sol.kind = SolveKind::Nonlinear;
  sol.nx = o.nx;
  sol.M = M;
  sol.L = pr.geo.L;
  sol.m_bar = pr.m_bar();
  sol.m = pr.m();
  const double h1 = sol.h1(), h2 = c.h2;
  sol.substeps = pick_substeps(pr, c, h1, o, 1.0 + 10.0 * s + 1e-3);
  transport_SB(pr, M, false, sol.S, sol.B);
  sol.u1.setZero(o.nx, M);
  sol.u2.setZero(o.nx, M + 1);
  const auto& geo = pr.geo;

  Vec u1_guess(M);
  double min_m2 = 1e300;

  // Closure: u1 at half rows and the wall value of u2 from (q, interior u2).
  const auto close = [&](double t, const Vec& y, Vec& u1, Vec& u2) {
    u2.resize(M + 1);
    u2(0) = 0.0;
    for (int j = 1; j < M; ++j) u2(j) = y(M + j - 1);
    u1 = u1_guess;
    for (int pass = 0; pass < 2; ++pass) {
      const Vec du = u1 - c.u_half;
      u2(M) = s * geo.g.prime(t) * (c.u_node(M) + extrap_top(du, M));
      for (int j = 0; j < M; ++j) {
        const double v = 0.5 * (u2(j) + u2(j + 1));
        u1(j) = recover_u1(y(j), sol.S(j), sol.B(j), v * v, u1(j), gas, o.newton_tol);
      }
    }
  };

  const auto rhs = [&](double t, const Vec& y) {
    Vec u1, u2;
    close(t, y, u1, u2);
    Vec f(2 * M - 1), w(M + 1), P(M);
    w(0) = 0.0;
    w(M) = s * geo.g.prime(t);
    for (int j = 1; j < M; ++j) {
      const double du = 0.5 * ((u1(j - 1) - c.u_half(j - 1)) + (u1(j) - c.u_half(j)));
      w(j) = u2(j) / (c.u_node(j) + du);
    }
    for (int j = 0; j < M; ++j) {
      const double v = 0.5 * (u2(j) + u2(j + 1));
      P(j) = pressure(sol.S(j), sol.B(j), u1(j) * u1(j) + v * v, gas);
      f(j) = ratio * (w(j + 1) - w(j)) / h2;
    }
    for (int j = 1; j < M; ++j) {
      f(M + j - 1) = -ratio * (P(j) - P(j - 1)) / h2 + (c.P_half(j) - c.P_half(j - 1)) / h2;
    }
    return f;
  };

  Vec y(2 * M - 1);
  for (int j = 0; j < M; ++j) {
    const double yy = (j + 0.5) * h2;
    const auto en = pr.inflow_pert(yy, false);
    const double u = c.u_half(j) + s * en.u1;
    const double v = 0.5 * s * (pr.inflow_pert(j * h2, false).u2 + pr.inflow_pert((j + 1) * h2, false).u2);
    const double rho = density(sol.S(j), sol.B(j), u * u + v * v, gas);
    y(j) = 1.0 / (rho * u);
    u1_guess(j) = u;
  }
  for (int j = 1; j < M; ++j) y(M + j - 1) = s * pr.inflow_pert(j * h2, false).u2;

  const auto store = [&](int i, double t) {
    Vec u1, u2;
    close(t, y, u1, u2);
    u1_guess = u1;
    sol.u1.row(i) = u1.transpose();
    sol.u2.row(i) = u2.transpose();
    for (int j = 0; j < M; ++j) {
      const double v = 0.5 * (u2(j) + u2(j + 1));
      const double q2 = u1(j) * u1(j) + v * v;
      const double P = pressure(sol.S(j), sol.B(j), q2, gas);
      const double rho = density(sol.S(j), sol.B(j), q2, gas);
      const double m2 = q2 * rho / (gas.gamma * P);
      min_m2 = std::min(min_m2, m2);
      if (!(m2 > 1.0)) {
        std::ostringstream os;
        os << "flow became subsonic at y1=" << t << ", row " << j;
        throw Error(ErrorKind::NotSupersonic, os.str(), std::sqrt(m2));
      }
    }
  };
  store(0, 0.0);
  const double k = h1 / sol.substeps;
  for (int i = 0; i + 1 < o.nx; ++i) {
    for (int n = 0; n < sol.substeps; ++n) rk4(rhs, i * h1 + n * k, k, y);
    store(i + 1, (i + 1) * h1);
  }
  sol.min_mach2 = min_m2;
  sol.picard_iters = 1;
  sol.final_update = 0.0;
  return sol;
}

FluxIdentityReport flux_identity(const Problem& pr, const SupersonicSolution& lin) {
  if (lin.kind != SolveKind::Linear) {
    throw Error(ErrorKind::Precondition, "flux identity applies to the linear solution");
  }
  const auto& cf = *pr.coeffs;
  const double s = pr.sigma();
  const int M = lin.M;
  const double h2 = lin.h2();
  // Reference integral on the fine hatted grid.
  const auto& y = pr.hb->y2();
  std::vector<double> f(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) f[k] = cf.b1m(y[k]) * pr.inflow_pert(y[k], true).u1;
  const double inflow = s * integrate(f, y[1] - y[0]);
  const double wall = s * cf.b2m(pr.m_bar()) * pr.hb->minus(pr.m_bar()).u;
  FluxIdentityReport r;
  for (int i = 0; i < lin.nx; ++i) {
    const double y1 = i * lin.h1();
    double sum = 0.0;
    for (int j = 0; j < M; ++j) sum += cf.b1m((j + 0.5) * h2) * lin.u1(i, j);
    sum *= h2;
    const double ex = inflow - wall * pr.geo.g(y1);
    r.y1.push_back(y1);
    r.discrete.push_back(sum);
    r.exact.push_back(ex);
    r.max_violation = std::max(r.max_violation, std::abs(sum - ex));
  }
  return r;
}

}  // namespace rotshock
