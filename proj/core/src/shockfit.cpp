#include "rotshock/shockfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

SubsonicColumns subsonic_columns(const Problem& pr, int M) {
  const GasModel& gas = pr.gas;
  const auto& hb = *pr.hb;
  SubsonicColumns c;
  c.M = M;
  c.m_bar = pr.m_bar();
  c.h2 = c.m_bar / M;
  c.u.resize(M);
  c.rho.resize(M);
  c.P.resize(M);
  c.S.resize(M);
  c.B.resize(M);
  c.c2.resize(M);
  for (int j = 0; j < M; ++j) {
    const double y = (j + 0.5) * c.h2;
    const auto p = hb.plus(y);
    c.u(j) = p.u;
    c.S(j) = p.S;
    c.B(j) = hb.minus(y).B;  // Bernoulli is continuous across the shock
    c.rho(j) = density(c.S(j), c.B(j), p.u * p.u, gas);
    c.P(j) = pressure(c.S(j), c.B(j), p.u * p.u, gas);
    c.c2(j) = gas.gamma * c.P(j) / c.rho(j);
  }
  c.u_node.resize(M + 1);
  c.P_jump.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    const double y = j * c.h2;
    c.P_jump(j) = hb.plus(y).P - hb.minus(y).P;
    if (j == 0 || j == M) {
      c.u_node(j) = hb.plus(y).u;
    } else {
      c.u_node(j) = 0.5 * (c.u(j - 1) + c.u(j));
    }
  }
  const auto p0 = hb.plus(0.0);
  c.u0 = p0.u;
  c.rhou0 = p0.rho * p0.u;
  c.lam1.resize(M);
  c.lam4.resize(M);
  c.lam2.resize(M + 1);
  c.lam3 = Eigen::VectorXd::Constant(M + 1, 1.0 / c.rhou0);
  for (int j = 0; j < M; ++j) {
    const double u2 = c.u(j) * c.u(j);
    c.lam1(j) = c.u0 * (1.0 - u2 / c.c2(j)) / (c.rho(j) * u2);
    c.lam4(j) = c.rho(j) * c.u(j) / c.rhou0;
  }
  for (int j = 0; j <= M; ++j) c.lam2(j) = c.u0 / c.u_node(j);
  return c;
}

JFunctionals::JFunctionals(const Problem& pr, const SubsonicColumns& c,
                           std::shared_ptr<const SupersonicSolution> lin)
    : pr_(&pr), lin_(std::move(lin)) {
  if (!lin_ || lin_->M != c.M) {
    throw Error(ErrorKind::Precondition, "supersonic and subsonic row counts differ");
  }
  const auto& cf = *pr.coeffs;
  const double g = pr.gas.gamma, s = pr.sigma();
  inv_sigma_ = s > 0.0 ? 1.0 / s : 0.0;
  w_.resize(c.M);
  J2_ = 0.0;
  for (int j = 0; j < c.M; ++j) {
    const double y = (j + 0.5) * c.h2;
    const double ru = c.rho(j) * c.u(j);
    const double a3 = -c.P(j) * cf.a2(y) / ((g - 1.0) * ru);
    w_(j) = (a3 - cf.a1(y)) * c.lam1(j) * c.h2;
    const auto en = pr.inflow_pert(y, true);
    const double pex = pr.P_ex(pr.hb->X2_plus(y));
    const double eB = cf.e1(y) + c.P(j) * cf.e2(y) / ((g - 1.0) * ru);
    J2_ += c.lam1(j) * c.h2 *
           (pex / ru + c.P(j) * en.S / ((g - 1.0) * ru) - en.B / c.u(j) + en.B * eB);
  }
  top_ = c.lam2(c.M) * c.u_node(c.M);
}

double JFunctionals::J1(double psi) const {
  double s = 0.0;
  for (int j = 0; j < w_.size(); ++j) s += w_(j) * lin_->u1_at(psi, j);
  const auto& g = pr_->geo.g;
  return inv_sigma_ * s + top_ * (g(pr_->geo.L) - g(psi));
}

double JFunctionals::J1_prime(double psi) const {
  double s = 0.0;
  for (int j = 0; j < w_.size(); ++j) s += w_(j) * lin_->du1_at(psi, j);
  return inv_sigma_ * s - top_ * pr_->geo.g.prime(psi);
}

double find_root_monotone(const std::function<double(double)>& J1, double J2, double a, double b,
                          int samples, double tol, int* iterations) {
  if (!(b > a)) throw Error(ErrorKind::Precondition, "empty shock-position bracket", b - a);
  samples = std::max(samples, 2);
  std::vector<double> x(samples + 1), f(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    x[k] = a + (b - a) * k / samples;
    f[k] = J1(x[k]);
  }
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi), std::abs(J2)});
  if (*hi - *lo <= 1e-10 * scale) {
    std::ostringstream os;
    os << "J1 is flat on [" << a << ", " << b << "] (spread " << *hi - *lo
       << "); the shock position is not determined by the data";
    throw Error(ErrorKind::DegenerateSelection, os.str(), *hi - *lo);
  }
  const double dir = f.back() > f.front() ? 1.0 : -1.0;
  for (int k = 0; k < samples; ++k) {
    if (!(dir * (f[k + 1] - f[k]) > 0.0)) {
      std::ostringstream os;
      os << "J1 is not monotone on [" << a << ", " << b << "] near " << x[k];
      throw Error(ErrorKind::DegenerateSelection, os.str(), x[k]);
    }
  }
  if (J2 < *lo || J2 > *hi) {
    std::ostringstream os;
    os << "no admissible shock position: J2 = " << J2 << " outside [" << *lo << ", " << *hi
       << "] on bracket [" << a << ", " << b << "]";
    throw Error(ErrorKind::OutOfRange, os.str(), J2);
  }
  // First sign change, so ties go to the smaller position.
  int k = 0;
  while (k < samples && (f[k] - J2) * (f[k + 1] - J2) > 0.0) ++k;
  const auto F = [&](double p) { return J1(p) - J2; };
  const auto r = bracketed_root(F, x[k], x[k + 1], f[k] - J2, f[k + 1] - J2);
  if (iterations) *iterations = r.iterations;
  if (std::abs(r.fx) > tol * scale) {
    throw Error(ErrorKind::NonConvergence, "shock-position root did not reach tolerance", r.fx);
  }
  return r.x;
}

double data_norm(const Problem& pr) {
  double n = 0.0;
  const auto& p = pr.pert;
  for (double x : linspace(0.0, 1.0, 513)) {
    n = std::max({n, std::abs(p.u1_en(x)), std::abs(p.u2_en(x)), std::abs(p.S_en(x)),
                  std::abs(p.B_en(x))});
  }
  double gp = 0.0;
  for (double x : linspace(0.0, pr.geo.L, 513)) gp = std::max(gp, std::abs(pr.geo.g.prime(x)));
  return n + gp;
}

ShockSelection selection_bracket(const Problem& pr, const JFunctionals& J,
                                 const SupersonicSolution& lin, const ShockfitOptions& o) {
  const auto& cf = *pr.coeffs;
  const auto& hb = *pr.hb;
  const double L = pr.geo.L, s = pr.sigma();
  ShockSelection sel;
  sel.J2 = J.J2();

  // Monotonicity bracket: I decides the monotonicity direction near the inlet.
  const auto& y = hb.y2();
  const double hy = y[1] - y[0];
  std::vector<double> F(y.size()), absw(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double a31 = cf.a3(y[k]) - cf.a1(y[k]);
    F[k] = cf.b1p(y[k]) * a31 / cf.b1m(y[k]);
    absw[k] = std::abs(a31 * cf.b1p(y[k]));
  }
  const UniformSpline Fs(F, 0.0, hy);
  std::vector<double> integrand(y.size()), mag(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double v = cf.b2m(y[k]) * pr.pert.u2_en(hb.X2(y[k]));
    integrand[k] = Fs.prime(y[k]) * v;
    mag[k] = std::abs(F[k]) * std::abs(v) / hb.m_bar();
  }
  sel.I = integrate(integrand, hy);
  const double I_scale = integrate(mag, hy);

  const double dn = data_norm(pr);
  double vmax = std::max({lin.u1.cwiseAbs().maxCoeff(), lin.u2.cwiseAbs().maxCoeff(),
                          lin.S.cwiseAbs().maxCoeff(), lin.B.cwiseAbs().maxCoeff()});
  sel.C_minus = (s > 0.0 && dn > 0.0) ? vmax / (s * dn) : 0.0;
  double g2 = 0.0;
  for (double x : linspace(0.0, L, 1001)) g2 = std::max(g2, std::abs(pr.geo.g.double_prime(x)));
  sel.frak_F = sel.C_minus * integrate(absw, hy) + J.top() * g2;

  if (s == 0.0) {
    sel.psi_bar = o.psi_bar_unperturbed.value_or(0.5 * L);
    sel.bracket = {sel.psi_bar, sel.psi_bar};
    sel.J1_at_psi_bar = J.J1(sel.psi_bar);
    return sel;
  }

  double a = 0.0, b = L;
  if (o.bracket) {
    a = o.bracket->first;
    b = o.bracket->second;
    if (!(a >= 0.0 && b <= L && b > a)) {
      throw Error(ErrorKind::Config, "shock bracket must satisfy 0 <= a < b <= L", b - a);
    }
  } else {
    if (std::abs(sel.I) <= 1e-9 * I_scale || sel.I == 0.0) {
      std::ostringstream os;
      os << "neither monotonicity condition holds (I = " << sel.I
         << "); the shock position is not selected by the data";
      throw Error(ErrorKind::DegenerateSelection, os.str(), sel.I);
    }
    sel.condition = sel.I > 0.0 ? 1 : -1;
    const double aI = std::abs(sel.I);
    sel.L_star = sel.frak_F > 0.0 ? aI / sel.frak_F : std::numeric_limits<double>::infinity();
    const double Lp = o.bracket_fraction * std::min(sel.L_star, L);
    sel.J_star = sel.condition * Lp * (aI - 0.5 * Lp * sel.frak_F);
    b = Lp;
    const double J0 = J.J1(0.0);
    sel.bracket_admissible = sel.condition > 0 ? (J0 < sel.J2 && sel.J2 < J0 + sel.J_star)
                                             : (J0 + sel.J_star < sel.J2 && sel.J2 < J0);
  }
  sel.bracket = {a, b};
  return sel;
}

ShockSelection find_shock_position(const Problem& pr, const JFunctionals& J,
                                   const SupersonicSolution& lin, const ShockfitOptions& o) {
  ShockSelection sel = selection_bracket(pr, J, lin, o);
  if (pr.sigma() == 0.0) return sel;
  const auto [a, b] = sel.bracket;
  sel.psi_bar = find_root_monotone([&](double p) { return J.J1(p); }, sel.J2, a, b, o.samples,
                                   o.root_tol, &sel.iterations);
  sel.J1_at_psi_bar = J.J1(sel.psi_bar);
  return sel;
}

int subsonic_cells(const Problem& pr, double psi_bar, int nx) {
  const double L = pr.geo.L;
  const int n = static_cast<int>(std::lround((nx - 1) * (L - psi_bar) / L));
  return std::max(4, n);
}

LinearSubsonicData assemble_linear_subsonic(const Problem& pr, const SubsonicColumns& c,
                                            const SupersonicSolution& lin, double psi_bar,
                                            int N) {
  const double L = pr.geo.L, s = pr.sigma(), g = pr.gas.gamma;
  if (!(psi_bar > 0.0 && psi_bar < L)) {
    throw Error(ErrorKind::OutOfRange, "base shock position outside (0, L)", psi_bar);
  }
  const int M = c.M;
  const auto& cf = *pr.coeffs;
  EllipticGrid grid{psi_bar, L, c.m_bar, N, M};
  LinearSubsonicData out;
  out.problem = DiscreteEllipticProblem::zeros(grid);
  auto& p = out.problem;
  p.lam1 = c.lam1;
  p.lam2 = c.lam2;
  p.lam3 = c.lam3;
  p.lam4 = c.lam4;
  out.S.resize(M);
  out.B.resize(M);
  Eigen::VectorXd flux(M);  // P S / (gamma - 1) - rho B
  for (int j = 0; j < M; ++j) {
    const double y = (j + 0.5) * c.h2;
    const double u1m = lin.u1_at(psi_bar, j);
    const auto en = pr.inflow_pert(y, true);
    const double Bd = s * en.B;
    const double Sp = cf.a2(y) * u1m + s * en.S + cf.e2(y) * Bd;
    out.S(j) = Sp;
    out.B(j) = Bd;
    p.h1(j) = cf.a1(y) * u1m + cf.e1(y) * Bd;
    p.h2(j) = (-s * pr.P_ex(pr.hb->X2_plus(y)) - c.P(j) * Sp / (g - 1.0) + c.rho(j) * Bd) /
              (c.rho(j) * c.u(j));
    flux(j) = c.P(j) * Sp / (g - 1.0) - c.rho(j) * Bd;
  }
  const double h1 = grid.h1();
  for (int i = 0; i < N; ++i) {
    p.h3(i) = s * c.u_node(M) * (pr.geo.g(grid.z1(i + 1)) - pr.geo.g(grid.z1(i))) / h1;
  }
  for (int j = 1; j < M; ++j) {
    const double src = c.lam3(j) * ((flux(j) - flux(j - 1)) -
                                    pr.mu_dot * (c.P(j) - c.P(j - 1))) / c.h2;
    for (int i = 1; i < N; ++i) p.H2(i, j) = src;
  }
  return out;
}

SubsonicField solve_linear_subsonic(const Problem& pr, const SubsonicColumns& c,
                                    const SupersonicSolution& lin, double psi_bar, int N,
                                    const EllipticOptions& eopts) {
  const LinearSubsonicData d = assemble_linear_subsonic(pr, c, lin, psi_bar, N);
  SubsonicField out;
  out.grid = d.problem.grid;
  out.S = d.S;
  out.B = d.B;
  out.defect = compatibility_defect(d.problem);
  if (std::abs(out.defect) > eopts.defect_tol) {
    std::ostringstream os;
    os << "shock position " << psi_bar << " is inconsistent with the data: defect "
       << out.defect;
    throw Error(ErrorKind::Incompatible, os.str(), out.defect);
  }
  EllipticOptions e = eopts;
  e.project = true;
  const auto sol = solve(d.problem, e);
  out.u1 = sol.v1;
  out.u2 = sol.v2;
  return out;
}

double shock_trace_u2(const Eigen::MatrixXd& u2, int j) {
  return (15.0 * u2(0, j) - 10.0 * u2(1, j) + 3.0 * u2(2, j)) / 8.0;
}

Eigen::VectorXd shock_slope(const SubsonicField& plus, const SupersonicSolution& minus,
                            double psi_bar, const SubsonicColumns& c, double m, double m_bar) {
  const int M = c.M;
  Eigen::VectorXd sl(M + 1);
  for (int j = 0; j <= M; ++j) {
    if (!(c.P_jump(j) > 1e-12)) {
      throw Error(ErrorKind::DegenerateBackground, "background pressure jump vanishes",
                  c.P_jump(j));
    }
    sl(j) = m / (m_bar * c.P_jump(j)) * (shock_trace_u2(plus.u2, j) - minus.u2_at(psi_bar, j));
  }
  return sl;
}

Eigen::VectorXd ShockFront::nodes() const {
  const int M = this->M();
  const double h = h2();
  Eigen::VectorXd p(M + 1);
  p(M) = psi_bar + psi_sharp;
  for (int j = M - 1; j >= 0; --j) p(j) = p(j + 1) - 0.5 * h * (psi_prime(j) + psi_prime(j + 1));
  return p;
}

Eigen::VectorXd ShockFront::half_rows() const {
  const Eigen::VectorXd p = nodes();
  const int M = this->M();
  const double h = h2();
  Eigen::VectorXd q(M);
  for (int j = 0; j < M; ++j) {
    q(j) = 0.5 * (p(j) + p(j + 1)) + h * (psi_prime(j) - psi_prime(j + 1)) / 8.0;
  }
  return q;
}

Eigen::VectorXd ShockFront::slope_half_rows() const {
  const int M = this->M();
  Eigen::VectorXd q(M);
  for (int j = 0; j < M; ++j) q(j) = 0.5 * (psi_prime(j) + psi_prime(j + 1));
  return q;
}

InitialApproximation initial_approximation(const Problem& pr, const ShockfitOptions& o) {
  InitialApproximation ia;
  auto lin = std::make_shared<SupersonicSolution>(solve_linear(pr, o.sup));
  ia.V_minus = lin;
  ia.cols = subsonic_columns(pr, lin->M);
  const JFunctionals J(pr, ia.cols, lin);
  ia.selection = find_shock_position(pr, J, *lin, o);
  const double psi = ia.selection.psi_bar;
  const int N = subsonic_cells(pr, psi, o.sup.nx);
  EllipticOptions e;
  e.defect_tol = o.defect_tol;
  ia.V_plus = solve_linear_subsonic(pr, ia.cols, *lin, psi, N, e);
  ia.front.psi_bar = psi;
  ia.front.psi_sharp = 0.0;
  ia.front.m_bar = pr.m_bar();
  ia.front.psi_prime = shock_slope(ia.V_plus, *lin, psi, ia.cols, pr.m(), pr.m_bar());
  const double dn = data_norm(pr);
  const double vp = std::max(ia.V_plus.u1.cwiseAbs().maxCoeff(), ia.V_plus.u2.cwiseAbs().maxCoeff());
  ia.amplification = (pr.sigma() > 0.0 && dn > 0.0)
                         ? (vp + ia.front.psi_prime.cwiseAbs().maxCoeff()) / (pr.sigma() * dn)
                         : 0.0;
  return ia;
}

}  // namespace rotshock
