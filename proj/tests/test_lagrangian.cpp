#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rotshock/error.hpp"
#include "rotshock/lagrangian.hpp"
#include "rotshock/numerics.hpp"

using namespace rotshock;

namespace {

BackgroundSolution background(double beta, Profile u = Profile::poly({2.0, 0.0, 0.1})) {
  UpstreamSpec s;
  s.u_minus = std::move(u);
  return build_background(s, GasModel{1.4, beta}, 1025);
}

}  // namespace

TEST(Lagrangian, MassFluxesUnperturbed) {
  const auto bg = background(0.0, Profile::constant(2.0));
  const auto mf = mass_fluxes(bg, Perturbation{}, 0.0);
  EXPECT_NEAR(mf.m_bar, 1.4 * 2.0, 1e-12);
  EXPECT_EQ(mf.m, mf.m_bar);
}

TEST(Lagrangian, MassFluxFollowsSupersonicLinearization) {
  // At fixed S and B, d(rho u)/du = rho (1 - M^2) < 0 for supersonic inflow.
  const auto bg = background(0.1);
  Perturbation p;
  p.u1_en = Profile::constant(0.5);
  double slope = 0.0;
  std::vector<double> f(bg.grid_x2.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = bg.rho_m[k] * (1.0 - 1.0 / bg.d[k]) * 0.5;
  slope = integrate(f, bg.h());
  ASSERT_LT(slope, 0.0);
  for (double sigma : {1e-3, 1e-4}) {
    const auto mf = mass_fluxes(bg, p, sigma);
    EXPECT_LT(mf.m, mf.m_bar);
    EXPECT_NEAR((mf.m - mf.m_bar) / sigma, slope, 50.0 * sigma * std::abs(slope));
  }
}

TEST(Lagrangian, FlowReversalRejected) {
  const auto bg = background(0.1);
  Perturbation p;
  p.u1_en = Profile::constant(-500.0);
  EXPECT_THROW(mass_fluxes(bg, p, 1e-2), Error);
}

TEST(Lagrangian, InverseMapConstantFlux) {
  const double q = 2.8, h = 1.0 / 64;
  const std::vector<double> f(65, q);
  const auto x = x2_of_y(f, h, 1.0, 1.0);
  EXPECT_EQ(x[0], 0.0);
  for (int k = 0; k <= 64; ++k) EXPECT_NEAR(x[k], k * h / q, 1e-15);
}

TEST(Lagrangian, InverseMapLinearFlux) {
  // rho u = 2 + x2 gives y2 = 2 x2 + x2^2 / 2 and m_bar = 2.5.
  const int n = 1025;
  std::vector<double> y(n), ru(n);
  const double mb = 2.5, h = mb / (n - 1);
  for (int k = 0; k < n; ++k) {
    y[k] = k * h;
    const double x = -2.0 + std::sqrt(4.0 + 2.0 * y[k]);
    ru[k] = 2.0 + x;
  }
  const auto x = x2_of_y(ru, h, 1.0, 1.0);
  EXPECT_NEAR(x.back(), 1.0, 1e-6);
  for (int k = 1; k < n; ++k) EXPECT_GT(x[k], x[k - 1]);
}

TEST(Lagrangian, NonPositiveFluxRejected) {
  EXPECT_THROW(x2_of_y({1.0, 0.0, 1.0}, 0.5, 1.0, 1.0), Error);
  EXPECT_THROW(x2_of_y_midpoints({1.0, -1.0}, 0.5, 1.0, 1.0), Error);
}

TEST(Lagrangian, HattedRoundTrip) {
  const auto bg = background(0.1);
  const HattedBackground hb(bg, 1025);
  const auto& y = hb.y2();
  std::vector<double> ru(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto p = hb.minus(y[k]);
    ru[k] = p.rho * p.u;
  }
  const auto x = x2_of_y(ru, y[1] - y[0], 1.0, 1.0);
  double err = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) err = std::max(err, std::abs(x[k] - hb.X2()[k]));
  EXPECT_LE(err, 1e-8);
  EXPECT_NEAR(hb.X2().back(), 1.0, 1e-10);
}

TEST(Lagrangian, HattedMassFluxContinuous) {
  const auto bg = background(0.2);
  const HattedBackground hb(bg, 1025);
  for (double y = 0.0; y <= hb.m_bar(); y += hb.m_bar() / 50) {
    const auto a = hb.minus(y), b = hb.plus(y);
    EXPECT_NEAR(a.rho * a.u, b.rho * b.u, 1e-10);
    EXPECT_NEAR(hb.X2(y), hb.X2_plus(y), 1e-10);
  }
  const auto p0 = hb.minus(0.0);
  EXPECT_NEAR(p0.u, bg.u_m[0], 1e-12);
  for (std::size_t k = 1; k < hb.X2().size(); ++k) EXPECT_GT(hb.X2()[k], hb.X2()[k - 1]);
}

TEST(Lagrangian, HattedConstantIsAffine) {
  const auto bg = background(0.0, Profile::constant(2.0));
  const HattedBackground hb(bg, 257);
  EXPECT_NEAR(hb.m_bar(), 2.8, 1e-12);
  for (double y = 0.0; y <= 2.8; y += 0.1) {
    EXPECT_NEAR(hb.X2(y), y / 2.8, 1e-12);
    EXPECT_NEAR(hb.plus(y).u, 0.75, 1e-12);
  }
}

TEST(Lagrangian, CharacteristicSpeeds) {
  const GasModel gas{1.4, 0.0};
  // u = (2, 0), rho = 1, c = 1 needs P = 1 / 1.4.
  const auto c = to_char({1.0, 2.0, 0.0, 1.0 / 1.4}, gas);
  const auto s = characteristic_speeds(c, 1.0, 1.0, 1.0, gas);
  ASSERT_TRUE(s.real);
  EXPECT_NEAR(s.lambda_plus, std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_NEAR(s.lambda_minus, -std::sqrt(3.0) / 2.0, 1e-12);

  const auto sub = to_char({1.0, 0.5, 0.0, 1.0}, gas);
  EXPECT_FALSE(characteristic_speeds(sub, 1.0, 1.0, 1.0, gas).real);

  const auto sonic = to_char({1.0, 1.0, 0.0, 1.0 / 1.4}, gas);
  const auto z = characteristic_speeds(sonic, 1.0, 1.0, 1.0, gas);
  EXPECT_NEAR(z.lambda_plus, 0.0, 1e-7);
  EXPECT_NEAR(z.lambda_minus, 0.0, 1e-7);

  const auto rest = to_char({1.0, 0.0, 0.0, 1.0}, gas);
  EXPECT_THROW(characteristic_speeds(rest, 1.0, 1.0, 1.0, gas), Error);
}

TEST(Lagrangian, GeometryValidation) {
  Geometry g;
  g.g = Profile::poly({0, 0, 0, 0, 1.0});
  EXPECT_NO_THROW(g.validate());
  g.g = Profile::poly({0, 0, 0.1});
  EXPECT_THROW(g.validate(), Error);
  g.g = Profile::poly({0, 0, 0, 0.1});
  EXPECT_THROW(g.validate(), Error);
}
