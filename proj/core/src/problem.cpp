#include "rotshock/problem.hpp"

#include <cmath>

#include "rotshock/error.hpp"

namespace rotshock {

Problem Problem::build(const GasModel& gas, const UpstreamSpec& up, const Geometry& geo,
                       const Perturbation& pert, std::size_t bg_nodes) {
  gas.validate();
  geo.validate();
  pert.validate();
  Problem p;
  p.gas = gas;
  p.upstream = up;
  p.geo = geo;
  p.pert = pert;
  auto bg = std::make_shared<BackgroundSolution>(build_background(up, gas, bg_nodes));
  p.bg = bg;
  auto hb = std::make_shared<HattedBackground>(*bg);
  p.hb = hb;
  p.coeffs = std::make_shared<ShockCoefficients>(hb);
  p.mf = mass_fluxes(*bg, pert, geo.sigma);

  // Linearized inflow mass flux perturbation.
  const std::size_t n = bg->grid_x2.size();
  std::vector<double> dflux(n), flux(n);
  const double g = gas.gamma;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = bg->grid_x2[k];
    const double rho = bg->rho_m[k], u = bg->u_m[k], P = bg->P_m[k];
    const double c2 = g * P / rho;
    dflux[k] = rho * (1.0 - u * u / c2) * pert.u1_en(x) +
               rho * u * (pert.B_en(x) / c2 - pert.S_en(x) / (g - 1.0));
    const auto s = inflow_state(*bg, pert, geo.sigma, x);
    flux[k] = density(s.S, s.B, s.u1 * s.u1 + s.u2 * s.u2, gas) * s.u1;
  }
  p.mu_dot = -geo.sigma * integrate(dflux, bg->h()) / p.mf.m_bar;

  // y2(x2) = (m_bar/m) int_0^x2 (rho u1)_in, inverted on the hatted grid.
  auto Y = cumulative_integral(flux, bg->h());
  for (double& v : Y) v *= p.mf.m_bar / p.mf.m;
  const UniformSpline Ys(Y, 0.0, bg->h());
  const auto& y2 = hb->y2();
  std::vector<double> X(y2.size());
  for (std::size_t k = 0; k < y2.size(); ++k) {
    double x = hb->X2()[k];
    for (int it = 0; it < 50 && k > 0; ++it) {
      const double dx = (Ys(x) - y2[k]) / Ys.prime(x);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    X[k] = k == 0 ? 0.0 : x;
  }
  p.X2_in = UniformSpline(X, 0.0, y2[1] - y2[0]);
  return p;
}

CharState Problem::inflow_pert(double y2, bool linear) const {
  const double x = linear ? hb->X2(y2) : X2_in(y2);
  return {pert.u1_en(x), pert.u2_en(x), pert.S_en(x), pert.B_en(x)};
}

}  // namespace rotshock
