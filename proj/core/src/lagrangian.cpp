#include "rotshock/lagrangian.hpp"

#include <cmath>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

void Geometry::validate() const {
  if (!(L > 0.0)) throw Error(ErrorKind::Config, "nozzle length must be positive", L);
  if (!(sigma >= 0.0)) throw Error(ErrorKind::Config, "sigma must be non-negative", sigma);
  const double tol = 1e-12;
  if (std::abs(g(0.0)) > tol || std::abs(g.prime(0.0)) > tol ||
      std::abs(g.double_prime(0.0)) > tol) {
    throw Error(ErrorKind::Config, "wall perturbation g must vanish to third order at x1=0",
                g(0.0));
  }
  if (g.is_poly() && g.coeffs().size() > 3 && std::abs(g.coeffs()[3]) > tol) {
    throw Error(ErrorKind::Config, "wall perturbation g must have g'''(0)=0", g.coeffs()[3]);
  }
}

void Perturbation::validate(double tol) const {
  if (std::abs(u2_en(0.0)) > tol || std::abs(u2_en(1.0)) > tol) {
    throw Error(ErrorKind::Config, "u2_en must vanish at x2=0 and x2=1",
                std::max(std::abs(u2_en(0.0)), std::abs(u2_en(1.0))));
  }
}

CharState inflow_state(const BackgroundSolution& bg, const Perturbation& pert, double sigma,
                       double x2) {
  const auto p = bg.at(x2);
  const auto c = to_char({p.rho_m, p.u_m, 0.0, p.P_m}, bg.gas);
  CharState s;
  s.u1 = c.u1 + sigma * pert.u1_en(x2);
  s.u2 = sigma * pert.u2_en(x2);
  s.S = c.S + sigma * pert.S_en(x2);
  s.B = c.B + sigma * pert.B_en(x2);
  return s;
}

MassFluxes mass_fluxes(const BackgroundSolution& bg, const Perturbation& pert, double sigma) {
  const std::size_t n = bg.grid_x2.size();
  std::vector<double> fb(n), fp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = bg.grid_x2[k];
    fb[k] = bg.rho_m[k] * bg.u_m[k];
    const auto s = inflow_state(bg, pert, sigma, x);
    const double rho = density(s.S, s.B, s.u1 * s.u1 + s.u2 * s.u2, bg.gas);
    fp[k] = sigma == 0.0 ? fb[k] : rho * s.u1;
    if (!(fp[k] > 0.0) || !(fb[k] > 0.0)) {
      std::ostringstream os;
      os << "flow reversal in the inflow mass flux at x2=" << x;
      throw Error(ErrorKind::FlowReversal, os.str(), fp[k]);
    }
  }
  MassFluxes r;
  r.m_bar = integrate(fb, bg.h());
  r.m = sigma == 0.0 ? r.m_bar : integrate(fp, bg.h());
  return r;
}

std::vector<double> x2_of_y(const std::vector<double>& rho_u1, double h2, double m,
                            double m_bar) {
  std::vector<double> f(rho_u1.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(rho_u1[k] > 0.0)) {
      throw Error(ErrorKind::FlowReversal, "rho u1 must be positive to invert the map",
                  rho_u1[k]);
    }
    f[k] = 1.0 / rho_u1[k];
  }
  auto F = cumulative_integral(f, h2);
  for (double& v : F) v *= m / m_bar;
  return F;
}

std::vector<double> x2_of_y_midpoints(const std::vector<double>& rho_u1, double h2, double m,
                                      double m_bar) {
  std::vector<double> x(rho_u1.size() + 1, 0.0);
  for (std::size_t k = 0; k < rho_u1.size(); ++k) {
    if (!(rho_u1[k] > 0.0)) {
      throw Error(ErrorKind::FlowReversal, "rho u1 must be positive to invert the map",
                  rho_u1[k]);
    }
    x[k + 1] = x[k] + (m / m_bar) * h2 / rho_u1[k];
  }
  return x;
}

HattedBackground::HattedBackground(const BackgroundSolution& bg, std::size_t n) : gas_(bg.gas) {
  const std::size_t nb = bg.grid_x2.size();
  if (n == 0) n = nb;
  const double hb = bg.h();
  std::vector<double> fm(nb), fp(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    fm[k] = bg.rho_m[k] * bg.u_m[k];
    fp[k] = bg.rho_p[k] * bg.u_p[k];
  }
  const auto Ym = cumulative_integral(fm, hb);
  const auto Yp = cumulative_integral(fp, hb);
  m_bar_ = Ym.back();
  const UniformSpline Yms(Ym, 0.0, hb), Yps(Yp, 0.0, hb);

  const auto invert = [&](const UniformSpline& Y, double y) {
    double x = y / m_bar_;
    for (int it = 0; it < 50; ++it) {
      const double dx = (Y(x) - y) / Y.prime(x);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    return x;
  };

  y2_ = linspace(0.0, m_bar_, n);
  const double h = y2_[1] - y2_[0];
  X2_.resize(n);
  std::vector<double> X2p(n);
  std::vector<double> rm(n), um(n), Pm(n), Sm(n), Bm(n), rp(n), up(n), Pp(n), Sp(n), Bp(n);
  for (std::size_t k = 0; k < n; ++k) {
    X2_[k] = k == 0 ? 0.0 : invert(Yms, y2_[k]);
    X2p[k] = k == 0 ? 0.0 : invert(Yps, y2_[k]);
    const auto p = bg.at(X2_[k]);
    rm[k] = p.rho_m;
    um[k] = p.u_m;
    Pm[k] = p.P_m;
    rp[k] = p.rho_p;
    up[k] = p.u_p;
    Pp[k] = p.P_p;
    const auto cm = to_char({rm[k], um[k], 0.0, Pm[k]}, gas_);
    const auto cp = to_char({rp[k], up[k], 0.0, Pp[k]}, gas_);
    Sm[k] = cm.S;
    Bm[k] = cm.B;
    Sp[k] = cp.S;
    Bp[k] = cp.B;
  }
  X2s_ = UniformSpline(X2_, 0.0, h);
  X2ps_ = UniformSpline(X2p, 0.0, h);
  m_ = {UniformSpline(rm, 0.0, h), UniformSpline(um, 0.0, h), UniformSpline(Pm, 0.0, h),
        UniformSpline(Sm, 0.0, h), UniformSpline(Bm, 0.0, h)};
  p_ = {UniformSpline(rp, 0.0, h), UniformSpline(up, 0.0, h), UniformSpline(Pp, 0.0, h),
        UniformSpline(Sp, 0.0, h), UniformSpline(Bp, 0.0, h)};
}

HatPoint HattedBackground::point(const Side& s, double y2) const {
  HatPoint p;
  p.rho = s.rho(y2);
  p.u = s.u(y2);
  p.P = s.P(y2);
  p.S = s.S(y2);
  p.B = s.B(y2);
  p.c2 = gas_.gamma * p.P / p.rho;
  p.M2 = p.u * p.u / p.c2;
  return p;
}

CharSpeeds characteristic_speeds(const CharState& state, double rho, double m, double m_bar,
                                 const GasModel& gas) {
  const double q2 = state.u1 * state.u1 + state.u2 * state.u2;
  if (!(q2 > 0.0)) throw Error(ErrorKind::InvalidState, "zero velocity has no characteristics");
  const double P = pressure(state.S, state.B, q2, gas);
  const double c2 = gas.gamma * P / rho;
  const double disc = q2 / c2 - 1.0;
  CharSpeeds r;
  if (disc < 0.0) return r;
  r.real = true;
  const double root = std::abs(state.u1) * std::sqrt(disc);
  const double scale = (m / m_bar) / (rho * q2);
  r.lambda_plus = scale * (-state.u2 + root);
  r.lambda_minus = scale * (-state.u2 - root);
  return r;
}

const Eigen::MatrixXd& Field::operator[](const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return comps[k];
  }
  throw Error(ErrorKind::Precondition, "no field component named " + name);
}

Eigen::MatrixXd& Field::operator[](const std::string& name) {
  return const_cast<Eigen::MatrixXd&>(static_cast<const Field&>(*this)[name]);
}

}  // namespace rotshock
