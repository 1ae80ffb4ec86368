#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "rotshock/background.hpp"
#include "rotshock/profile.hpp"
#include "rotshock/thermo.hpp"

namespace rotshock {

struct Geometry {
  double L = 1.0;
  Profile g;  // upper wall is x2 = 1 + sigma g(x1)
  double sigma = 0.0;

  // g and its first three derivatives must vanish at the inlet.
  void validate() const;
};

// Inflow perturbation (in u1, u2, S, B) and exit-pressure perturbation, all
// functions of the physical height x2.
struct Perturbation {
  Profile u1_en, u2_en, S_en, B_en, P_ex;

  void validate(double tol = 1e-12) const;
};

struct MassFluxes {
  double m = 0.0;
  double m_bar = 0.0;
};

// Perturbed inflow state at physical height x2.
CharState inflow_state(const BackgroundSolution& bg, const Perturbation& pert, double sigma,
                       double x2);

MassFluxes mass_fluxes(const BackgroundSolution& bg, const Perturbation& pert, double sigma);

// Inverse Lagrangian map along one column: x2 at uniformly spaced y2 nodes from
// nodal samples of rho u1.
std::vector<double> x2_of_y(const std::vector<double>& rho_u1, double h2, double m,
                            double m_bar);
// Same map when rho u1 is sampled at the midpoints of M cells; returns x2 at the
// M + 1 cell edges.
std::vector<double> x2_of_y_midpoints(const std::vector<double>& rho_u1, double h2, double m,
                                      double m_bar);

struct HatPoint {
  double rho, u, P, S, B, c2, M2;
};

// Background profiles expressed in the mass coordinate y2 in [0, m_bar].
class HattedBackground {
 public:
  HattedBackground() = default;
  HattedBackground(const BackgroundSolution& bg, std::size_t n = 0);

  double m_bar() const { return m_bar_; }
  const GasModel& gas() const { return gas_; }
  const std::vector<double>& y2() const { return y2_; }
  const std::vector<double>& X2() const { return X2_; }

  HatPoint minus(double y2) const { return point(m_, y2); }
  HatPoint plus(double y2) const { return point(p_, y2); }
  double X2(double y2) const { return X2s_(y2); }
  // Physical height reached at mass coordinate y2 when the flux integrand is the
  // downstream one (identical to X2 up to quadrature error).
  double X2_plus(double y2) const { return X2ps_(y2); }

  double u_minus_prime(double y2) const { return m_.u.prime(y2); }
  double u_plus_prime(double y2) const { return p_.u.prime(y2); }
  double S_minus_prime(double y2) const { return m_.S.prime(y2); }
  double S_plus_prime(double y2) const { return p_.S.prime(y2); }
  double P_minus_prime(double y2) const { return m_.P.prime(y2); }
  double P_plus_prime(double y2) const { return p_.P.prime(y2); }

 private:
  struct Side {
    UniformSpline rho, u, P, S, B;
  };
  HatPoint point(const Side& s, double y2) const;

  GasModel gas_;
  double m_bar_ = 0.0;
  std::vector<double> y2_, X2_;
  UniformSpline X2s_, X2ps_;
  Side m_, p_;
};

struct CharSpeeds {
  bool real = false;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

CharSpeeds characteristic_speeds(const CharState& state, double rho, double m, double m_bar,
                                 const GasModel& gas);

// Uniform rectangle [a, b] x [0, m_bar] with node counts n1 x n2.
struct LagrangianGrid {
  int n1 = 0, n2 = 0;
  double a = 0.0, b = 1.0;
  double m = 1.0, m_bar = 1.0;
  double h1() const { return (b - a) / (n1 - 1); }
  double h2() const { return m_bar / (n2 - 1); }
  double y1(int i) const { return a + h1() * i; }
  double y2(int j) const { return h2() * j; }
};

// Nodal samples of named components; rows index y1, columns y2.
struct Field {
  LagrangianGrid grid;
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> comps;

  const Eigen::MatrixXd& operator[](const std::string& name) const;
  Eigen::MatrixXd& operator[](const std::string& name);
};

}  // namespace rotshock
