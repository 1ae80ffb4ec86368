#include "rotshock/coefficients.hpp"

#include <cmath>

#include "rotshock/error.hpp"

namespace rotshock {

ShockCoefficients::ShockCoefficients(std::shared_ptr<const HattedBackground> hbp)
    : hb_(std::move(hbp)), m_bar_(hb_->m_bar()) {
  const HattedBackground& hb = *hb_;
  const auto& y = hb.y2();
  const std::size_t n = y.size();
  const double h = y[1] - y[0];
  const double gamma = hb.gas().gamma, beta = hb.gas().beta;

  const auto build = [&](int side, UniformSpline& b1, UniformSpline& b2, UniformSpline& b3,
                         UniformSpline& b4) {
    std::vector<double> f2(n), f4(n);
    for (std::size_t k = 0; k < n; ++k) {
      const HatPoint p = side < 0 ? hb.minus(y[k]) : hb.plus(y[k]);
      const double du = side < 0 ? hb.u_minus_prime(y[k]) : hb.u_plus_prime(y[k]);
      const double dS = side < 0 ? hb.S_minus_prime(y[k]) : hb.S_plus_prime(y[k]);
      if (std::abs(p.M2 - 1.0) < 1e-12) {
        throw Error(ErrorKind::DegenerateBackground, "sonic background state", p.M2);
      }
      f2[k] = -du / p.u;
      f4[k] = du / p.u - beta / (p.rho * p.c2) - dS / gamma;
    }
    const auto F2 = cumulative_integral(f2, h);
    const auto F4 = cumulative_integral(f4, h);
    std::vector<double> v1(n), v2(n), v3(n), v4(n);
    for (std::size_t k = 0; k < n; ++k) {
      const HatPoint p = side < 0 ? hb.minus(y[k]) : hb.plus(y[k]);
      v2[k] = std::exp(F2[k]);
      v4[k] = std::exp(F4[k]);
      v1[k] = (1.0 - p.M2) / (p.rho * p.u) * v2[k];
      v3[k] = v4[k] / (p.rho * p.u);
    }
    b1 = UniformSpline(v1, 0.0, h);
    b2 = UniformSpline(v2, 0.0, h);
    b3 = UniformSpline(v3, 0.0, h);
    b4 = UniformSpline(v4, 0.0, h);
  };
  build(-1, b1m_, b2m_, b3m_, b4m_);
  build(+1, b1p_, b2p_, b3p_, b4p_);
}

double ShockCoefficients::a1(double y) const {
  const auto m = hb_->minus(y), p = hb_->plus(y);
  if (std::abs(p.M2 - 1.0) < 1e-12) {
    throw Error(ErrorKind::DegenerateBackground, "downstream Mach number equals 1", p.M2);
  }
  return (p.M2 / m.M2) * (m.M2 - 1.0) / (p.M2 - 1.0);
}

double ShockCoefficients::a2(double y) const {
  const auto m = hb_->minus(y), p = hb_->plus(y);
  const double g = hb_->gas().gamma;
  return (g - 1.0) * (m.M2 - 1.0) * (p.P - m.P) / (p.P * m.u);
}

double ShockCoefficients::a3(double y) const {
  const auto p = hb_->plus(y);
  const double g = hb_->gas().gamma;
  return -p.P * a2(y) / ((g - 1.0) * p.rho * p.u);
}

double ShockCoefficients::e1(double y) const {
  const auto m = hb_->minus(y), p = hb_->plus(y);
  const double g = hb_->gas().gamma;
  return (g - 1.0) * p.M2 * (1.0 / m.u - 1.0 / p.u) / (p.M2 - 1.0);
}

double ShockCoefficients::e2(double y) const {
  const auto m = hb_->minus(y), p = hb_->plus(y);
  const double g = hb_->gas().gamma;
  return (g - 1.0) * (-(p.M2 - 1.0) / p.u * e1(y) + 1.0 / p.c2 - 1.0 / m.c2);
}

Vec4 ShockCoefficients::a0(int side) const { return {0.0, side > 0 ? 1.0 : -1.0, 0.0, 0.0}; }

Vec4 ShockCoefficients::a1_vec(double y, int side) const {
  const auto p = side > 0 ? hb_->plus(y) : hb_->minus(y);
  const double g = hb_->gas().gamma;
  const double s = side > 0 ? 1.0 : -1.0;
  const double f = s / (p.rho * p.u);
  return {f * (p.M2 - 1.0) / p.u, 0.0, f / (g - 1.0), -f / p.c2};
}

Vec4 ShockCoefficients::a2_vec(double y, int side) const {
  const auto p = side > 0 ? hb_->plus(y) : hb_->minus(y);
  const double g = hb_->gas().gamma;
  const double s = side > 0 ? 1.0 : -1.0;
  return {s * (p.M2 - 1.0) / (g * p.M2), 0.0, 0.0, s * (g - 1.0) / (g * p.u)};
}

std::array<double, 2> ShockCoefficients::linear_jump(double y, double du1m, double dSm,
                                                     double dB) const {
  // a1+ . V+ + a1- . V- = 0 and a2+ . V+ + a2- . V- = 0 with B+ = B-.
  const Vec4 p1 = a1_vec(y, +1), m1 = a1_vec(y, -1);
  const Vec4 p2 = a2_vec(y, +1), m2 = a2_vec(y, -1);
  const double r1 = -(m1[0] * du1m + m1[2] * dSm + m1[3] * dB) - p1[3] * dB;
  const double r2 = -(m2[0] * du1m + m2[2] * dSm + m2[3] * dB) - p2[3] * dB;
  // [[p1[0], p1[2]], [p2[0], 0]] (u1+, S+) = (r1, r2)
  const double du1p = r2 / p2[0];
  const double dSp = (r1 - p1[0] * du1p) / p1[2];
  return {du1p, dSp};
}

}  // namespace rotshock
