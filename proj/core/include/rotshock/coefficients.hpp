#pragma once

#include <array>
#include <memory>
#include <vector>

#include "rotshock/lagrangian.hpp"
#include "rotshock/numerics.hpp"

namespace rotshock {

using Vec4 = std::array<double, 4>;  // components ordered (u1, u2, S, B)

// Linearization coefficients of the two-sided problem on [0, m_bar]. The b
// profiles are exponential integrals evaluated by quadrature on the hatted grid.
class ShockCoefficients {
 public:
  ShockCoefficients() = default;
  explicit ShockCoefficients(std::shared_ptr<const HattedBackground> hb);

  double b1m(double y) const { return b1m_(y); }
  double b2m(double y) const { return b2m_(y); }
  double b3m(double y) const { return b3m_(y); }
  double b4m(double y) const { return b4m_(y); }
  double b1p(double y) const { return b1p_(y); }
  double b2p(double y) const { return b2p_(y); }
  double b3p(double y) const { return b3p_(y); }
  double b4p(double y) const { return b4p_(y); }

  // Closed-form shock coefficients: u1+ = a1 u1- and S+ = a2 u1- + S- when B is
  // unperturbed; a3 is the exit-condition weight -P+ a2 / ((gamma-1) rho+ u+).
  double a1(double y) const;
  double a2(double y) const;
  double a3(double y) const;
  // Extra terms multiplying the Bernoulli perturbation in u1+ and S+.
  double e1(double y) const;
  double e2(double y) const;

  Vec4 a0(int side) const;  // side = +1 or -1
  Vec4 a1_vec(double y, int side) const;
  Vec4 a2_vec(double y, int side) const;

  // Solves the linearized jump conditions for (u1+, S+) given the upstream
  // perturbation and the common Bernoulli perturbation.
  std::array<double, 2> linear_jump(double y, double du1m, double dSm, double dB) const;

  const HattedBackground& hatted() const { return *hb_; }
  double m_bar() const { return m_bar_; }

 private:
  std::shared_ptr<const HattedBackground> hb_;
  double m_bar_ = 0.0;
  UniformSpline b1m_, b2m_, b3m_, b4m_, b1p_, b2p_, b3p_, b4p_;
};

}  // namespace rotshock
