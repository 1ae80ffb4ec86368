#pragma once

#include <memory>

#include "rotshock/background.hpp"
#include "rotshock/coefficients.hpp"
#include "rotshock/lagrangian.hpp"

namespace rotshock {

// Everything derived from the physical data that the solvers share: background,
// hatted profiles, shock coefficients, mass fluxes and the inflow maps.
struct Problem {
  GasModel gas;
  UpstreamSpec upstream;
  Geometry geo;
  Perturbation pert;

  std::shared_ptr<const BackgroundSolution> bg;
  std::shared_ptr<const HattedBackground> hb;
  std::shared_ptr<const ShockCoefficients> coeffs;
  MassFluxes mf;
  // First-order part of m_bar/m - 1 (proportional to sigma).
  double mu_dot = 0.0;
  // Physical inflow height reached at mass coordinate y2 under the perturbed flux.
  UniformSpline X2_in;

  static Problem build(const GasModel& gas, const UpstreamSpec& up, const Geometry& geo,
                       const Perturbation& pert, std::size_t bg_nodes = 1025);

  double sigma() const { return geo.sigma; }
  double m_bar() const { return mf.m_bar; }
  double m() const { return mf.m; }

  // Inflow perturbation profiles in the mass coordinate; `linear` selects the
  // background reparametrization, otherwise the perturbed one is used.
  CharState inflow_pert(double y2, bool linear) const;
  // Exit pressure perturbation datum at physical height x2.
  double P_ex(double x2) const { return pert.P_ex(x2); }
};

}  // namespace rotshock
