#include "rotshock/background.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

void UpstreamSpec::validate(std::size_t probe_nodes) const {
  if (!(M_top > 1.0)) {
    throw Error(ErrorKind::Precondition, "upstream Mach number at the top wall must exceed 1",
                M_top);
  }
  if (!(P_top > 0.0)) throw Error(ErrorKind::Precondition, "P_top must be positive", P_top);
  const auto x = linspace(0.0, 1.0, probe_nodes);
  for (double t : x) {
    const double u = u_minus(t);
    if (!(u > 0.0)) {
      std::ostringstream os;
      os << "upstream velocity must be positive, got " << u << " at x2=" << t;
      throw Error(ErrorKind::Precondition, os.str(), u);
    }
  }
}

std::vector<double> solve_mach_profile(const UpstreamSpec& spec, const GasModel& gas,
                                       std::size_t n) {
  gas.validate();
  spec.validate(n);
  const auto x = linspace(0.0, 1.0, n);
  const double h = x[1] - x[0];
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = gas.beta * gas.gamma / spec.u_minus(x[k]);
  const auto F = cumulative_integral(f, h);
  const double d1 = 1.0 / (spec.M_top * spec.M_top);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tail = F.back() - F[k];  // int_{x2}^{1} beta gamma / u
    d[k] = 1.0 + (d1 - 1.0) * std::exp(-tail);
  }
  d.back() = d1;
  return d;
}

ColumnProfiles upstream_state(const UpstreamSpec& spec, const std::vector<double>& d,
                              const GasModel& gas) {
  const std::size_t n = d.size();
  const auto x = linspace(0.0, 1.0, n);
  const double h = x[1] - x[0];
  ColumnProfiles c;
  c.u.resize(n);
  c.P.resize(n);
  c.rho.resize(n);
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    c.u[k] = spec.u_minus(x[k]);
    f[k] = gas.beta * gas.gamma / (d[k] * c.u[k]);
  }
  const auto F = cumulative_integral(f, h);
  for (std::size_t k = 0; k < n; ++k) {
    c.P[k] = spec.P_top * std::exp(F.back() - F[k]);
    c.rho[k] = gas.gamma * c.P[k] / (d[k] * c.u[k] * c.u[k]);
  }
  return c;
}

GasState normal_shock(const GasState& up, const GasModel& gas) {
  const double g = gas.gamma;
  const double M2 = up.rho * up.u1 * up.u1 / (g * up.P);
  if (!(M2 > 1.0 - 1e-14)) {
    throw Error(ErrorKind::NotSupersonic, "upstream state is not supersonic", std::sqrt(M2));
  }
  const double B = 0.5 * up.u1 * up.u1 + g * up.P / ((g - 1.0) * up.rho);
  GasState dn;
  dn.u1 = 2.0 * (g - 1.0) * B / ((g + 1.0) * up.u1);
  dn.u2 = 0.0;
  dn.P = 2.0 * up.rho * up.u1 * up.u1 / (g + 1.0) - (g - 1.0) / (g + 1.0) * up.P;
  dn.rho = up.rho * up.u1 / dn.u1;
  return dn;
}

ColumnProfiles downstream_state(const ColumnProfiles& upstream, const GasModel& gas) {
  const std::size_t n = upstream.u.size();
  ColumnProfiles c;
  c.rho.resize(n);
  c.u.resize(n);
  c.P.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const GasState dn = normal_shock({upstream.rho[k], upstream.u[k], 0.0, upstream.P[k]}, gas);
    c.rho[k] = dn.rho;
    c.u[k] = dn.u1;
    c.P[k] = dn.P;
  }
  return c;
}

RhJump rh_residual(const GasState& l, const GasState& r, const GasModel& gas) {
  const double g = gas.gamma;
  const auto bern = [g](const GasState& s) {
    return 0.5 * (s.u1 * s.u1 + s.u2 * s.u2) + g * s.P / ((g - 1.0) * s.rho);
  };
  RhJump j;
  j.mass = r.rho * r.u1 - l.rho * l.u1;
  j.momentum = (r.rho * r.u1 * r.u1 + r.P) - (l.rho * l.u1 * l.u1 + l.P);
  j.bernoulli = bern(r) - bern(l);
  return j;
}

std::array<double, 4> extension_coefficients() {
  Eigen::Matrix4d A;
  for (int p = 0; p < 4; ++p) {
    for (int k = 0; k < 4; ++k) A(p, k) = std::pow(-1.0 / (k + 1.0), p);
  }
  const Eigen::Vector4d c = A.fullPivLu().solve(Eigen::Vector4d::Ones());
  return {c(0), c(1), c(2), c(3)};
}

std::function<double(double)> extend_profile(std::function<double(double)> f) {
  const auto c = extension_coefficients();
  return [f = std::move(f), c](double y) {
    if (y <= 1.0) return f(y);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += c[k] * f(1.0 + (1.0 - y) / (k + 1.0));
    return s;
  };
}

BackgroundPoint BackgroundSolution::at(double x2) const {
  return {spl.d(x2),     spl.rho_m(x2), spl.u_m(x2), spl.P_m(x2),
          spl.rho_p(x2), spl.u_p(x2),   spl.P_p(x2)};
}

double BackgroundSolution::rho_m_prime(double x2) const { return spl.rho_m.prime(x2); }
double BackgroundSolution::u_m_prime(double x2) const { return spl.u_m.prime(x2); }

BackgroundSolution build_background(const UpstreamSpec& spec, const GasModel& gas,
                                    std::size_t n) {
  if (n < 9) throw Error(ErrorKind::Precondition, "background needs at least 9 nodes", n);
  BackgroundSolution bg;
  bg.gas = gas;
  bg.grid_x2 = linspace(0.0, 1.0, n);
  bg.d = solve_mach_profile(spec, gas, n);
  const auto up = upstream_state(spec, bg.d, gas);
  const auto dn = downstream_state(up, gas);
  bg.rho_m = up.rho;
  bg.u_m = up.u;
  bg.P_m = up.P;
  bg.rho_p = dn.rho;
  bg.u_p = dn.u;
  bg.P_p = dn.P;
  bg.S_m.resize(n);
  bg.B_m.resize(n);
  bg.S_p.resize(n);
  bg.B_p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto cm = to_char({up.rho[k], up.u[k], 0.0, up.P[k]}, gas);
    const auto cp = to_char({dn.rho[k], dn.u[k], 0.0, dn.P[k]}, gas);
    bg.S_m[k] = cm.S;
    bg.B_m[k] = cm.B;
    bg.S_p[k] = cp.S;
    bg.B_p[k] = cp.B;
    const double Mp2 = dn.rho[k] * dn.u[k] * dn.u[k] / (gas.gamma * dn.P[k]);
    if (!(Mp2 < 1.0)) {
      throw Error(ErrorKind::DegenerateBackground, "downstream flow is not subsonic",
                  std::sqrt(Mp2));
    }
  }

  // Extension to [0, 2] with the same spacing.
  const double h = bg.h();
  bg.ext_x2 = linspace(0.0, 2.0, 2 * n - 1);
  const auto ext = [&](const std::vector<double>& v) {
    UniformSpline s(v, 0.0, h);
    auto fe = extend_profile([s](double y) { return s(y); });
    std::vector<double> out(bg.ext_x2.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < n ? v[k] : fe(bg.ext_x2[k]);
    return out;
  };
  bg.ext_d = ext(bg.d);
  bg.ext_rho_m = ext(bg.rho_m);
  bg.ext_u_m = ext(bg.u_m);
  bg.ext_P_m = ext(bg.P_m);
  bg.ext_rho_p = ext(bg.rho_p);
  bg.ext_u_p = ext(bg.u_p);
  bg.ext_P_p = ext(bg.P_p);
  bg.spl.d = UniformSpline(bg.ext_d, 0.0, h);
  bg.spl.rho_m = UniformSpline(bg.ext_rho_m, 0.0, h);
  bg.spl.u_m = UniformSpline(bg.ext_u_m, 0.0, h);
  bg.spl.P_m = UniformSpline(bg.ext_P_m, 0.0, h);
  bg.spl.rho_p = UniformSpline(bg.ext_rho_p, 0.0, h);
  bg.spl.u_p = UniformSpline(bg.ext_u_p, 0.0, h);
  bg.spl.P_p = UniformSpline(bg.ext_P_p, 0.0, h);
  return bg;
}

}  // namespace rotshock
