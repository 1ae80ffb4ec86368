#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rotshock/numerics.hpp"
#include "rotshock/profile.hpp"
#include "rotshock/thermo.hpp"

namespace rotshock {

struct UpstreamSpec {
  Profile u_minus = Profile::constant(2.0);
  double M_top = 2.0;
  double P_top = 1.0;

  void validate(std::size_t probe_nodes = 1025) const;
};

struct ColumnProfiles {
  std::vector<double> rho, u, P;
};

struct RhJump {
  double mass = 0.0;
  double momentum = 0.0;
  double bernoulli = 0.0;
};

// Background state at one height.
struct BackgroundPoint {
  double d, rho_m, u_m, P_m, rho_p, u_p, P_p;
};

struct BackgroundSolution {
  GasModel gas;
  std::vector<double> grid_x2;  // uniform on [0, 1]
  std::vector<double> d;
  std::vector<double> rho_m, u_m, P_m;
  std::vector<double> rho_p, u_p, P_p;
  std::vector<double> S_m, B_m, S_p, B_p;

  // Same profiles on [0, 2]: the upper half comes from the reflection extension.
  std::vector<double> ext_x2;
  std::vector<double> ext_d, ext_rho_m, ext_u_m, ext_P_m, ext_rho_p, ext_u_p, ext_P_p;

  double h() const { return grid_x2[1] - grid_x2[0]; }
  // Spline evaluation on [0, 2] (clamped outside).
  BackgroundPoint at(double x2) const;
  double rho_m_prime(double x2) const;
  double u_m_prime(double x2) const;

  // Splines over the extended grid, built by build_background.
  struct Splines {
    UniformSpline d, rho_m, u_m, P_m, rho_p, u_p, P_p;
  } spl;
};

// d = 1/M^2 of the upstream flow on n uniform nodes of [0, 1].
std::vector<double> solve_mach_profile(const UpstreamSpec& spec, const GasModel& gas,
                                       std::size_t n);

ColumnProfiles upstream_state(const UpstreamSpec& spec, const std::vector<double>& d,
                              const GasModel& gas);

// Normal-shock jump applied pointwise to a supersonic column.
ColumnProfiles downstream_state(const ColumnProfiles& upstream, const GasModel& gas);
GasState normal_shock(const GasState& upstream, const GasModel& gas);

// Signed jumps right minus left of mass flux, normal momentum flux and Bernoulli.
RhJump rh_residual(const GasState& left, const GasState& right, const GasModel& gas);

// Coefficients of f_e(y) = sum_k c_k f(1 + (1 - y)/k), k = 1..4.
std::array<double, 4> extension_coefficients();
std::function<double(double)> extend_profile(std::function<double(double)> f);

BackgroundSolution build_background(const UpstreamSpec& spec, const GasModel& gas,
                                    std::size_t n = 1025);

}  // namespace rotshock
