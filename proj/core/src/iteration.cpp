#include "rotshock/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rotshock/error.hpp"
#include "rotshock/lagrangian.hpp"
#include "rotshock/numerics.hpp"
#include "rotshock/thermo.hpp"

namespace rotshock {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

double extrap3(double a, double b, double c) { return (15.0 * a - 10.0 * b + 3.0 * c) / 8.0; }

struct Jump {
  double G1 = 0.0, G2 = 0.0, P_plus = 0.0, P_minus = 0.0;
};

// Jump conditions with the front slope eliminated through [u2]/[P].
Jump jump_conditions(double u1m, double u2m, double Sm, double Bm, double u1p, double u2p,
                     double Sp, double Bp, const GasModel& gas) {
  const double qm = u1m * u1m + u2m * u2m, qp = u1p * u1p + u2p * u2p;
  const double rm = density(Sm, Bm, qm, gas), Pm = pressure(Sm, Bm, qm, gas);
  const double rp = density(Sp, Bp, qp, gas), Pp = pressure(Sp, Bp, qp, gas);
  const double r = (u2p - u2m) / (Pp - Pm);
  Jump j;
  j.G1 = 1.0 / (rp * u1p) - 1.0 / (rm * u1m) + r * (u2p / u1p - u2m / u1m);
  j.G2 = (u1p + Pp / (rp * u1p)) - (u1m + Pm / (rm * u1m)) + r * (Pp * u2p / u1p - Pm * u2m / u1m);
  j.P_plus = Pp;
  j.P_minus = Pm;
  return j;
}

// Newton on (u1+, S+) with a central-difference Jacobian.
void solve_jump(double u1m, double u2m, double Sm, double B, double u2p, const GasModel& gas,
                double& u1p, double& Sp) {
  for (int it = 0; it < 40; ++it) {
    const Jump f = jump_conditions(u1m, u2m, Sm, B, u1p, u2p, Sp, B, gas);
    const double du = 1e-6 * std::abs(u1p), dS = 1e-6;
    const Jump a = jump_conditions(u1m, u2m, Sm, B, u1p + du, u2p, Sp, B, gas);
    const Jump b = jump_conditions(u1m, u2m, Sm, B, u1p - du, u2p, Sp, B, gas);
    const Jump c = jump_conditions(u1m, u2m, Sm, B, u1p, u2p, Sp + dS, B, gas);
    const Jump d = jump_conditions(u1m, u2m, Sm, B, u1p, u2p, Sp - dS, B, gas);
    const double j11 = (a.G1 - b.G1) / (2 * du), j21 = (a.G2 - b.G2) / (2 * du);
    const double j12 = (c.G1 - d.G1) / (2 * dS), j22 = (c.G2 - d.G2) / (2 * dS);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0)) {
      throw Error(ErrorKind::InvalidState, "singular jump-condition Jacobian behind the front");
    }
    const double x = (j22 * f.G1 - j12 * f.G2) / det;
    const double y = (j11 * f.G2 - j21 * f.G1) / det;
    u1p -= x;
    Sp -= y;
    if (!(u1p > 0.0)) throw Error(ErrorKind::FlowReversal, "u1 behind the front is not positive", u1p);
    if (std::abs(x) <= 1e-15 * std::abs(u1p) && std::abs(y) <= 1e-15 * (1.0 + std::abs(Sp))) return;
    if (it > 6 && std::abs(x) <= 1e-13 * std::abs(u1p) && std::abs(y) <= 1e-13 * (1.0 + std::abs(Sp)))
      return;
  }
  throw Error(ErrorKind::NonConvergence, "jump conditions behind the front did not converge");
}

}  // namespace

// ---------------------------------------------------------------------------
// Coordinates

CoordinateMap::CoordinateMap(const ShockFront& front, double L) : front_(front), L_(L) {
  nodes_ = front.nodes();
  if (!(front.psi_bar > 0.0 && front.psi_bar < L)) {
    throw Error(ErrorKind::OutOfRange, "base front position outside (0, L)", front.psi_bar);
  }
  if (nodes_.maxCoeff() >= L) {
    throw Error(ErrorKind::OutOfRange, "front reaches the exit", nodes_.maxCoeff());
  }
  if (nodes_.minCoeff() <= 0.0) {
    throw Error(ErrorKind::OutOfRange, "front reaches the inlet", nodes_.minCoeff());
  }
}

double CoordinateMap::psi(double z2) const {
  const int M = front_.M();
  const double h = front_.h2();
  const int j = std::clamp(static_cast<int>(std::floor(z2 / h)), 0, M - 1);
  const double t = z2 - j * h;
  const auto& s = front_.psi_prime;
  return nodes_(j) + t * s(j) + 0.5 * t * t / h * (s(j + 1) - s(j));
}

double CoordinateMap::psi_prime(double z2) const {
  const int M = front_.M();
  const double h = front_.h2();
  const int j = std::clamp(static_cast<int>(std::floor(z2 / h)), 0, M - 1);
  const double t = (z2 - j * h) / h;
  return (1.0 - t) * front_.psi_prime(j) + t * front_.psi_prime(j + 1);
}

double CoordinateMap::Y1(double z1, double z2) const {
  return z1 + (L_ - z1) * (psi(z2) - front_.psi_bar) / (L_ - front_.psi_bar);
}

double CoordinateMap::z1(double y1, double y2) const {
  // Y1 is affine in z1 with slope J.
  const double J = jacobian(y2);
  return front_.psi_bar + (y1 - psi(y2)) / J;
}

double CoordinateMap::jacobian(double z2) const {
  return (L_ - psi(z2)) / (L_ - front_.psi_bar);
}

double CoordinateMap::Y1_z2(double z1, double z2) const {
  return (L_ - z1) * psi_prime(z2) / (L_ - front_.psi_bar);
}

CoordinateMap fix_coordinates(const ShockFront& front, double L) { return CoordinateMap(front, L); }

ShockFront IterationState::front(double m_bar) const {
  ShockFront f;
  f.psi_bar = psi_bar;
  f.psi_sharp = psi_sharp;
  f.psi_prime = psi_prime;
  f.m_bar = m_bar;
  return f;
}

double state_distance(const IterationState& a, const IterationState& b, bool with_sharp) {
  double d = std::max({(a.U1 - b.U1).cwiseAbs().maxCoeff(), (a.U2 - b.U2).cwiseAbs().maxCoeff(),
                       (a.S - b.S).cwiseAbs().maxCoeff(),
                       (a.psi_prime - b.psi_prime).cwiseAbs().maxCoeff()});
  if (with_sharp) d = std::max(d, std::abs(a.psi_sharp - b.psi_sharp));
  return d;
}

// ---------------------------------------------------------------------------
// Scheme

struct NonlinearScheme::Impl {
  const Problem* pr = nullptr;
  InitialApproximation init;
  std::shared_ptr<const SupersonicSolution> sup;
  IterationOptions opts;
  SubsonicColumns cols;
  EllipticGrid grid;
  std::unique_ptr<EllipticSolver> solver;
  Vec Bpert;  // nonlinear Bernoulli perturbation per half row

  // Everything evaluated from one iterate at one value of psi_sharp.
  struct Eval {
    Vec psi_node, psi_half, slope_node, slope_half, J_node, J_half;
    Mat u1;    // full u1 at x-faces
    Mat u2xf;  // u2 at x-faces
    Mat q;     // 1/(rho u1) at x-faces
    Mat p;     // pressure perturbation at x-faces
    Vec u2_trace;   // u2 behind the front, node rows
    Vec gavg;       // mean g' over each top face
    Vec u1_top;     // full u1 at the top faces
    Mat N1, N3;
    Vec S_full, B_full;
  };

  double ratio() const { return pr->m_bar() / pr->m(); }

  Eval evaluate(const IterationState& s, double psi_sharp) const {
    const int N = grid.N, M = grid.M;
    const double h1 = grid.h1(), h2 = grid.h2(), L = pr->geo.L, pb = s.psi_bar;
    const GasModel& gas = pr->gas;
    const double r = ratio();
    Eval e;
    ShockFront f = s.front(grid.m_bar);
    f.psi_sharp = psi_sharp;
    e.psi_node = f.nodes();
    e.psi_half = f.half_rows();
    e.slope_node = s.psi_prime;
    e.slope_half = f.slope_half_rows();
    e.J_node = (L - e.psi_node.array()) / (L - pb);
    e.J_half = (L - e.psi_half.array()) / (L - pb);
    if (e.J_node.minCoeff() <= 0.0 || e.psi_node.minCoeff() < 0.0) {
      throw Error(ErrorKind::OutOfRange, "front leaves the nozzle", psi_sharp);
    }
    e.S_full = cols.S + s.S;
    e.B_full = cols.B + s.B;

    e.u1.resize(N + 1, M);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j < M; ++j) e.u1(i, j) = cols.u(j) + s.U1(i, j);

    // u2 at vertices: averages inside, three-point extrapolation on the two ends.
    Mat u2v(N + 1, M + 1);
    for (int j = 0; j <= M; ++j) {
      for (int i = 1; i < N; ++i) u2v(i, j) = 0.5 * (s.U2(i - 1, j) + s.U2(i, j));
      u2v(0, j) = extrap3(s.U2(0, j), s.U2(1, j), s.U2(2, j));
      u2v(N, j) = extrap3(s.U2(N - 1, j), s.U2(N - 2, j), s.U2(N - 3, j));
    }
    e.u2_trace = u2v.row(0).transpose();
    e.u2xf.resize(N + 1, M);
    e.q.resize(N + 1, M);
    e.p.resize(N + 1, M);
    for (int i = 0; i <= N; ++i) {
      for (int j = 0; j < M; ++j) {
        const double v = 0.5 * (u2v(i, j) + u2v(i, j + 1));
        e.u2xf(i, j) = v;
        const double q2 = e.u1(i, j) * e.u1(i, j) + v * v;
        const double rho = density(e.S_full(j), e.B_full(j), q2, gas);
        e.q(i, j) = 1.0 / (rho * e.u1(i, j));
        e.p(i, j) = pressure(e.S_full(j), e.B_full(j), q2, gas) - cols.P(j);
      }
    }

    // Top wall: mean g' over each face of the fixed grid, mapped through Y1.
    e.gavg.resize(N);
    e.u1_top.resize(N);
    const double shift = psi_sharp / (L - pb);
    const auto Ytop = [&](double z) { return z + (L - z) * shift; };
    for (int i = 0; i < N; ++i) {
      const double za = grid.z1(i), zb = grid.z1(i + 1);
      e.gavg(i) = (pr->geo.g(Ytop(zb)) - pr->geo.g(Ytop(za))) / (h1 * e.J_node(M));
      const double a = extrap3(s.U1(i, M - 1), s.U1(i, M - 2), s.U1(i, M - 3));
      const double b = extrap3(s.U1(i + 1, M - 1), s.U1(i + 1, M - 2), s.U1(i + 1, M - 3));
      e.u1_top(i) = cols.u_node(M) + 0.5 * (a + b);
    }

    // Mass residual at cells.
    Mat Gy(N, M + 1);
    const double sig = pr->sigma();
    for (int i = 0; i < N; ++i) {
      Gy(i, 0) = 0.0;
      Gy(i, M) = -r * sig * e.gavg(i);
      for (int j = 1; j < M; ++j) {
        const double u1y =
            0.25 * (e.u1(i, j - 1) + e.u1(i + 1, j - 1) + e.u1(i, j) + e.u1(i + 1, j));
        Gy(i, j) = -r * s.U2(i, j) / u1y;
      }
    }
    Mat F(N + 1, M);
    for (int i = 0; i <= N; ++i) {
      const double zi = grid.z1(i);
      for (int j = 0; j < M; ++j) {
        const double Yz = (L - zi) * e.slope_half(j) / (L - pb);
        const double G = -r * e.u2xf(i, j) / e.u1(i, j);
        F(i, j) = e.q(i, j) - 1.0 / (cols.rho(j) * cols.u(j)) - Yz * G;
      }
    }
    e.N1.resize(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j)
        e.N1(i, j) = (F(i + 1, j) - F(i, j)) / h1 +
                     (e.J_node(j + 1) * Gy(i, j + 1) - e.J_node(j) * Gy(i, j)) / h2;

    // Transverse momentum at interior vertices.
    e.N3 = Mat::Zero(N + 1, M + 1);
    Mat py(N, M + 1);
    for (int i = 0; i < N; ++i)
      for (int j = 1; j < M; ++j)
        py(i, j) = 0.25 * (e.p(i, j - 1) + e.p(i + 1, j - 1) + e.p(i, j) + e.p(i + 1, j));
    for (int i = 1; i < N; ++i) {
      for (int j = 1; j < M; ++j) {
        const double za = grid.z1(i - 0.5), zb = grid.z1(i + 0.5);
        const double Ya = (L - za) * e.slope_node(j) / (L - pb);
        const double Yb = (L - zb) * e.slope_node(j) / (L - pb);
        const double dP = (cols.P(j) - cols.P(j - 1)) / h2;
        e.N3(i, j) = (s.U2(i, j) - s.U2(i - 1, j)) / h1 +
                     r * (-(Yb * py(i, j) - Ya * py(i - 1, j)) / h1 +
                          (e.J_half(j) * e.p(i, j) - e.J_half(j - 1) * e.p(i, j - 1)) / h2) +
                     (r - 1.0) * e.J_node(j) * dP;
      }
    }
    return e;
  }

  // State ahead of the front at half row j.
  void minus_state(double y1, int j, double& u1m, double& u2m) const {
    u1m = sup->u1_at(y1, j);
    u2m = 0.5 * (sup->u2_at(y1, j) + sup->u2_at(y1, j + 1));
  }

  Vec exit_target(const IterationState&, const Eval& e) const {
    const int N = grid.N, M = grid.M;
    const double h2 = grid.h2();
    Vec t(M);
    double acc = 0.0;
    const double w = pr->m() / pr->m_bar();
    for (int j = 0; j < M; ++j) {
      const double X = w * h2 * (acc + 0.5 * e.q(N, j));
      acc += e.q(N, j);
      t(j) = pr->sigma() * pr->P_ex(X);
    }
    return t;
  }

  // Entropy and u1 behind the front from the jump conditions; needs only the
  // front position and the u2 trace of the iterate.
  void front_states(const IterationState& s, double psi_sharp, Vec& u1p_out, Vec& S_out) const {
    const int M = grid.M;
    ShockFront f = s.front(grid.m_bar);
    f.psi_sharp = psi_sharp;
    const Vec ph = f.half_rows();
    u1p_out.resize(M);
    S_out.resize(M);
    for (int j = 0; j < M; ++j) {
      if (!(ph(j) >= 0.0 && ph(j) < pr->geo.L)) {
        throw Error(ErrorKind::OutOfRange, "front leaves the nozzle", ph(j));
      }
      double u1m, u2m;
      minus_state(ph(j), j, u1m, u2m);
      const double u2p = 0.5 * (shock_trace_u2(s.U2, j) + shock_trace_u2(s.U2, j + 1));
      double u1p = cols.u(j) + s.U1(0, j), Sp = cols.S(j) + s.S(j);
      solve_jump(u1m, u2m, sup->S(j), sup->B(j), u2p, pr->gas, u1p, Sp);
      u1p_out(j) = u1p;
      S_out(j) = Sp - cols.S(j);
    }
  }

  StepData assemble(const IterationState& s0, double psi_sharp) const {
    const int N = grid.N, M = grid.M;
    StepData d;
    Vec u1p;
    front_states(s0, psi_sharp, u1p, d.S_star);
    // The new entropy is used throughout; the iterate's own S does not enter.
    IterationState s = s0;
    s.S = d.S_star;
    const Eval e = evaluate(s, psi_sharp);
    d.problem = DiscreteEllipticProblem::zeros(grid);
    auto& p = d.problem;
    p.lam1 = cols.lam1;
    p.lam2 = cols.lam2;
    p.lam3 = cols.lam3;
    p.lam4 = cols.lam4;
    for (int j = 0; j < M; ++j) p.h1(j) = u1p(j) - cols.u(j);

    // Exit: linearized pressure correction towards the target.
    const Vec target = exit_target(s, e);
    for (int j = 0; j < M; ++j) {
      const double ru = cols.rho(j) * cols.u(j);
      p.h2(j) = s.U1(N, j) + (e.p(N, j) - target(j)) / ru;
    }

    // Top wall: flow tangency.
    for (int i = 0; i < N; ++i) p.h3(i) = pr->sigma() * e.u1_top(i) * e.gavg(i);

    // Sources: linear operator of the iterate plus the scaled nonlinear residual.
    Mat r1, r2;
    elliptic_residuals(p, s.U1, s.U2, &r1, &r2);
    // r = Lin(U) - H with H = 0 here.
    p.H1 = r1 + cols.u0 * e.N1;
    p.H2 = Mat::Zero(N + 1, M + 1);
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < M; ++j) p.H2(i, j) = r2(i, j) - e.N3(i, j) / cols.rhou0;

    d.N1 = e.N1;
    d.N3 = e.N3;
    d.G0 = slope_condition(s, e);
    d.defect = compatibility_defect(p);
    double sc = 0.0;
    const double h1 = grid.h1(), h2 = grid.h2();
    for (int j = 0; j < M; ++j) sc += cols.lam1(j) * (std::abs(p.h1(j)) + std::abs(p.h2(j))) * h2;
    sc += std::abs(cols.lam2(M)) * p.h3.cwiseAbs().sum() * h1;
    sc += p.H1.cwiseAbs().sum() * h1 * h2;
    d.defect_scale = sc;
    return d;
  }

  // G0 = [u2] - (m_bar psi'/m) [P] at node rows for the current iterate.
  Vec slope_condition(const IterationState& s, const Eval& e) const {
    const int M = grid.M;
    const GasModel& gas = pr->gas;
    Vec Pp(M), Pm(M);
    for (int j = 0; j < M; ++j) {
      double u1m, u2m;
      minus_state(e.psi_half(j), j, u1m, u2m);
      Pm(j) = pressure(sup->S(j), sup->B(j), u1m * u1m + u2m * u2m, gas);
      Pp(j) = cols.P(j) + e.p(0, j);
    }
    (void)s;
    Vec G0(M + 1);
    for (int j = 0; j <= M; ++j) {
      double jp, jm;
      if (j == 0) {
        jp = extrap3(Pp(0), Pp(1), Pp(2));
        jm = extrap3(Pm(0), Pm(1), Pm(2));
      } else if (j == M) {
        jp = extrap3(Pp(M - 1), Pp(M - 2), Pp(M - 3));
        jm = extrap3(Pm(M - 1), Pm(M - 2), Pm(M - 3));
      } else {
        jp = 0.5 * (Pp(j - 1) + Pp(j));
        jm = 0.5 * (Pm(j - 1) + Pm(j));
      }
      const double u2m = sup->u2_at(e.psi_node(j), j);
      G0(j) = (e.u2_trace(j) - u2m) - ratio() * e.slope_node(j) * (jp - jm);
    }
    return G0;
  }

  // Admissible range of psi_sharp keeping the front strictly inside (0, L).
  std::pair<double, double> sharp_range(const IterationState& s) const {
    ShockFront f = s.front(grid.m_bar);
    f.psi_sharp = 0.0;
    const Vec n = f.nodes();
    const Vec h = f.half_rows();
    const double lo = std::max(n.minCoeff(), h.minCoeff());
    const double hi = std::max(n.maxCoeff(), h.maxCoeff());
    const double L = pr->geo.L;
    const double pad = 1e-9 * L;
    return {-lo + pad, L - hi - pad};
  }

  double solve_sharp(const IterationState& s) const {
    const auto f = [&](double x) { return assemble(s, x).defect; };
    const auto [lo, hi] = sharp_range(s);
    if (!(lo < hi)) throw Error(ErrorKind::OutOfRange, "front does not fit in the nozzle");
    const double L = pr->geo.L;
    double x0 = std::clamp(s.psi_sharp, lo, hi);
    const StepData d0 = assemble(s, x0);
    const double f0 = d0.defect;
    // Floor by the background flux so round-off in the unperturbed problem is not chased.
    const double ref = cols.lam1.sum() * d0.problem.grid.h2() * cols.u0;
    const double scale = std::max(d0.defect_scale, ref);
    if (std::abs(f0) <= 1e-14 * scale) return x0;
    double dx = std::max(1e-6 * L, 1e-2 * pr->sigma() * L);
    if (x0 + dx > hi) dx = -dx;
    const double f1 = f(x0 + dx);
    const double slope = (f1 - f0) / dx;
    if (!(std::abs(slope) * L > 1e-9 * scale)) {
      throw Error(ErrorKind::DegenerateSelection,
                  "compatibility defect does not depend on the front position", slope);
    }
    // Secant guess, then expand a bracket around it.
    const double xg = std::clamp(x0 - f0 / slope, lo, hi);
    double w = std::max(std::abs(xg - x0), std::abs(dx));
    double a = std::max(lo, xg - w), b = std::min(hi, xg + w);
    double fa = f(a), fb = f(b);
    for (int k = 0; k < 60 && fa * fb > 0.0; ++k) {
      if (a <= lo && b >= hi) break;
      w *= 2.0;
      if (std::abs(fa) < std::abs(fb)) {
        a = std::max(lo, xg - w);
        fa = f(a);
      } else {
        b = std::min(hi, xg + w);
        fb = f(b);
      }
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) {
      throw Error(ErrorKind::OutOfRange, "no front position makes the elliptic problem solvable",
                  std::abs(fa) < std::abs(fb) ? a : b);
    }
    return bracketed_root(f, a, b, fa, fb).x;
  }

  IterationState apply(const IterationState& s) const {
    const double x = solve_sharp(s);
    const StepData d = assemble(s, x);
    const auto sol = solver->solve(d.problem);
    IterationState n = s;
    n.U1 = sol.v1;
    n.U2 = sol.v2;
    n.S = d.S_star;
    n.psi_sharp = x;
    const int M = grid.M;
    const double w = pr->m() / pr->m_bar();
    for (int j = 0; j <= M; ++j) {
      const double du2 = shock_trace_u2(sol.v2, j) - shock_trace_u2(s.U2, j);
      n.psi_prime(j) = s.psi_prime(j) + w / cols.P_jump(j) * (du2 + d.G0(j));
    }
    n.iter = s.iter + 1;
    n.update_norm = state_distance(n, s, true);
    return n;
  }

  ResidualReport report(const IterationState& s) const {
    const int N = grid.N, M = grid.M;
    const GasModel& gas = pr->gas;
    const Eval e = evaluate(s, s.psi_sharp);
    ResidualReport r;
    r.pde_residual = std::max(e.N1.cwiseAbs().maxCoeff(), e.N3.cwiseAbs().maxCoeff());
    double rh = 0.0;
    for (int j = 0; j < M; ++j) {
      double u1m, u2m;
      minus_state(e.psi_half(j), j, u1m, u2m);
      const double u2p = 0.5 * (e.u2_trace(j) + e.u2_trace(j + 1));
      const Jump jc = jump_conditions(u1m, u2m, sup->S(j), sup->B(j), e.u1(0, j), u2p,
                                      e.S_full(j), e.B_full(j), gas);
      rh = std::max({rh, std::abs(jc.G1), std::abs(jc.G2), std::abs(e.B_full(j) - sup->B(j))});
    }
    rh = std::max(rh, slope_condition(s, e).cwiseAbs().maxCoeff());
    r.rh_residual = rh;
    const Vec target = exit_target(s, e);
    for (int j = 0; j < M; ++j)
      r.exit_residual = std::max(r.exit_residual, std::abs(e.p(N, j) - target(j)));
    for (int i = 0; i < N; ++i)
      r.wall_residual = std::max(
          r.wall_residual, std::abs(s.U2(i, M) / e.u1_top(i) - pr->sigma() * e.gavg(i)));
    r.defect = assemble(s, s.psi_sharp).defect;
    return r;
  }
};

NonlinearScheme::NonlinearScheme(const Problem& pr, const InitialApproximation& init,
                                 std::shared_ptr<const SupersonicSolution> sup,
                                 const IterationOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  auto& m = *impl_;
  m.pr = &pr;
  m.init = init;
  m.sup = std::move(sup);
  m.opts = opts;
  m.cols = init.cols;
  m.grid = init.V_plus.grid;
  if (m.grid.N < 4 || m.grid.M < 4) {
    throw Error(ErrorKind::Precondition, "subsonic grid too small for the iteration");
  }
  if (m.sup->kind != SolveKind::Nonlinear || m.sup->M != m.grid.M) {
    throw Error(ErrorKind::Precondition, "iteration needs the nonlinear supersonic solution on the same rows");
  }
  EllipticOptions eo;
  eo.defect_tol = opts.defect_tol;
  eo.project = true;
  m.solver = std::make_unique<EllipticSolver>(m.grid, m.cols.lam1, m.cols.lam2, m.cols.lam3,
                                              m.cols.lam4, eo);
  m.Bpert = m.sup->B - m.cols.B;
}

NonlinearScheme::~NonlinearScheme() = default;
NonlinearScheme::NonlinearScheme(NonlinearScheme&&) noexcept = default;

IterationState NonlinearScheme::initial_state() const {
  const auto& m = *impl_;
  IterationState s;
  s.grid = m.grid;
  s.U1 = m.init.V_plus.u1;
  s.U2 = m.init.V_plus.u2;
  s.S = m.init.V_plus.S;
  s.B = m.Bpert;
  s.psi_prime = m.init.front.psi_prime;
  s.psi_bar = m.init.front.psi_bar;
  s.psi_sharp = 0.0;
  return s;
}

StepData NonlinearScheme::assemble_step_data(const IterationState& s, double psi_sharp) const {
  return impl_->assemble(s, psi_sharp);
}

double NonlinearScheme::solve_psi_sharp(const IterationState& s) const {
  return impl_->solve_sharp(s);
}

IterationState NonlinearScheme::apply_T(const IterationState& s) const { return impl_->apply(s); }

ResidualReport NonlinearScheme::residuals(const IterationState& s) const {
  return impl_->report(s);
}

const SubsonicColumns& NonlinearScheme::columns() const { return impl_->cols; }
const SupersonicSolution& NonlinearScheme::supersonic() const { return *impl_->sup; }

RunResult run(const Problem& pr, const RunOptions& o) {
  RunResult res;
  res.init = initial_approximation(pr, o.shock);
  res.supersonic = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, o.shock.sup));
  const NonlinearScheme scheme(pr, res.init, res.supersonic, o.iter);
  const IterationState start = scheme.initial_state();
  IterationState s = start;
  const double sig = pr.sigma();
  const double radius = o.iter.trust_factor * std::pow(sig, 1.5);
  // Updates below this are round-off and say nothing about contraction.
  const double floor = 1e-13 * (1.0 + pr.hb->plus(0.0).u);
  double prev = 0.0;
  bool converged = false;
  for (int k = 1; k <= o.iter.max_iter; ++k) {
    IterationState n = scheme.apply_T(s);
    IterationLogEntry le;
    le.iter = k;
    le.update_norm = n.update_norm;
    le.psi_sharp = n.psi_sharp;
    le.kappa = (prev > floor && n.update_norm > floor) ? n.update_norm / prev : 0.0;
    res.kappa = std::max(res.kappa, le.kappa);
    le.defect = scheme.assemble_step_data(n, n.psi_sharp).defect;
    res.log.push_back(le);
    prev = n.update_norm;
    if (o.iter.enforce_trust && sig > 0.0) {
      const double dist = state_distance(n, start, false);
      if (dist > radius) {
        std::ostringstream os;
        os << "iterate left the trust region at step " << k << ": distance " << dist
           << " > " << radius;
        throw Error(ErrorKind::TrustRegion, os.str(), dist);
      }
    }
    s = std::move(n);
    if (s.update_norm <= o.iter.tol_fp) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << o.iter.max_iter << " steps; updates:";
    for (const auto& l : res.log) os << ' ' << l.update_norm;
    throw Error(ErrorKind::NonConvergence, os.str(), s.update_norm);
  }
  res.state = s;
  res.front = s.front(pr.m_bar());
  res.report = scheme.residuals(s);
  res.C1 = sig > 0.0 ? std::abs(s.psi_sharp) / sig : 0.0;
  return res;
}

double measure_contraction(const NonlinearScheme& scheme, const IterationState& s, double eps) {
  const int N = s.grid.N, M = s.grid.M;
  const double pi = 3.14159265358979323846;
  IterationState p = s;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j < M; ++j)
      p.U1(i, j) += eps * std::cos(pi * i / N) * std::cos(pi * (j + 0.5) / M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= M; ++j) p.U2(i, j) += eps * std::sin(pi * j / M) * std::cos(pi * (i + 0.5) / N);
  for (int j = 0; j <= M; ++j) p.psi_prime(j) += eps * std::cos(pi * j / M);
  const double din = state_distance(p, s, false);
  const IterationState a = scheme.apply_T(s), b = scheme.apply_T(p);
  return state_distance(a, b, false) / din;
}

Eigen::MatrixXd eulerian_heights(const Problem& pr, const SubsonicColumns& cols,
                                 const IterationState& s) {
  const int N = s.grid.N, M = s.grid.M;
  Eigen::MatrixXd X(N + 1, M + 1);
  std::vector<double> ru(M);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j < M; ++j) {
      const double u1 = cols.u(j) + s.U1(i, j);
      double u2 = 0.0;
      if (i > 0 && i < N) {
        u2 = 0.25 * (s.U2(i - 1, j) + s.U2(i, j) + s.U2(i - 1, j + 1) + s.U2(i, j + 1));
      } else {
        const int a = i == 0 ? 0 : N - 1, b = i == 0 ? 1 : N - 2, c = i == 0 ? 2 : N - 3;
        u2 = 0.5 * (extrap3(s.U2(a, j), s.U2(b, j), s.U2(c, j)) +
                    extrap3(s.U2(a, j + 1), s.U2(b, j + 1), s.U2(c, j + 1)));
      }
      ru[j] = density(cols.S(j) + s.S(j), cols.B(j) + s.B(j), u1 * u1 + u2 * u2, pr.gas) * u1;
    }
    const auto x = x2_of_y_midpoints(ru, s.grid.h2(), pr.m(), pr.m_bar());
    for (int j = 0; j <= M; ++j) X(i, j) = x[j];
  }
  return X;
}

}  // namespace rotshock
