#include <gtest/gtest.h>

#include <cmath>

#include "rotshock/error.hpp"
#include "rotshock/iteration.hpp"

using namespace rotshock;

namespace {

Problem rotating(double sigma) {
  GasModel gas{1.4, 0.1};
  UpstreamSpec up;
  up.u_minus = Profile::poly({2.0, 0.0, 0.1});
  Geometry geo;
  geo.sigma = sigma;
  Perturbation p;
  p.u2_en = Profile::poly({0.0, 1.0, -1.0});
  p.S_en = Profile::poly({0.0, 0.2});
  p.P_ex = Profile::poly({-1.148485298});
  return Problem::build(gas, up, geo, p, 513);
}

RunOptions coarse() {
  RunOptions o;
  o.shock.sup.nx = 65;
  o.shock.sup.ny = 33;
  o.shock.bracket = std::make_pair(0.2, 0.7);
  return o;
}

ShockFront curved_front() {
  ShockFront f;
  f.psi_bar = 0.4;
  f.m_bar = 1.5;
  f.psi_prime = Eigen::VectorXd(33);
  for (int j = 0; j <= 32; ++j) f.psi_prime(j) = 0.05 * std::sin(3.0 * j / 32.0);
  f.psi_sharp = 0.02;
  return f;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Config;
}

}  // namespace

TEST(CoordinateMap, FlatFrontIsIdentity) {
  ShockFront f;
  f.psi_bar = 0.3;
  f.m_bar = 2.0;
  f.psi_prime = Eigen::VectorXd::Zero(17);
  const auto map = fix_coordinates(f, 1.0);
  for (double z1 : {0.3, 0.5, 1.0})
    for (double z2 : {0.0, 0.7, 2.0}) {
      EXPECT_NEAR(map.Y1(z1, z2), z1, 1e-15);
      EXPECT_NEAR(map.jacobian(z2), 1.0, 1e-15);
      EXPECT_NEAR(map.Y1_z2(z1, z2), 0.0, 1e-15);
    }
}

TEST(CoordinateMap, RoundTripAndEndpoints) {
  const auto f = curved_front();
  const auto map = fix_coordinates(f, 1.0);
  for (double z2 = 0.0; z2 <= 1.5; z2 += 0.1) {
    EXPECT_NEAR(map.Y1(f.psi_bar, z2), map.psi(z2), 1e-14);
    EXPECT_NEAR(map.Y1(1.0, z2), 1.0, 1e-14);
    for (double z1 = 0.4; z1 <= 1.0; z1 += 0.05) EXPECT_NEAR(map.z1(map.Y1(z1, z2), z2), z1, 1e-13);
    EXPECT_NEAR(map.jacobian(z2), (1.0 - map.psi(z2)) / (1.0 - f.psi_bar), 1e-14);
  }
  // The front is anchored at the top wall.
  EXPECT_NEAR(map.psi(f.m_bar), f.psi_bar + f.psi_sharp, 1e-15);
  EXPECT_NEAR(map.psi(0.0), f.nodes()(0), 1e-15);
}

TEST(CoordinateMap, SlopeMatchesDifference) {
  const auto map = fix_coordinates(curved_front(), 1.0);
  const double h = 1e-6;
  for (double z2 : {0.2, 0.75, 1.3}) {
    EXPECT_NEAR(map.psi_prime(z2), (map.psi(z2 + h) - map.psi(z2 - h)) / (2 * h), 1e-6);
    EXPECT_NEAR(map.Y1_z2(0.7, z2), (map.Y1(0.7, z2 + h) - map.Y1(0.7, z2 - h)) / (2 * h), 1e-6);
  }
}

TEST(CoordinateMap, FrontBeyondExitRejected) {
  auto f = curved_front();
  f.psi_prime.setConstant(1.0);
  EXPECT_EQ(kind_of([&] { fix_coordinates(f, 1.0); }), ErrorKind::OutOfRange);
}

TEST(Iteration, UnperturbedFixedPoint) {
  auto o = coarse();
  o.shock.bracket.reset();
  o.shock.psi_bar_unperturbed = 0.5;
  const auto r = run(rotating(0.0), o);
  EXPECT_EQ(r.log.size(), 1u);
  EXPECT_LE(r.report.pde_residual, 1e-10);
  EXPECT_LE(r.report.rh_residual, 1e-10);
  EXPECT_LE(std::abs(r.report.defect), 1e-10);
  EXPECT_EQ(r.state.psi_sharp, 0.0);
  EXPECT_NEAR(r.front.psi_bar, 0.5, 1e-15);
}

TEST(Iteration, BackgroundResidualsVanish) {
  auto o = coarse();
  o.shock.bracket.reset();
  o.shock.psi_bar_unperturbed = 0.35;
  const auto pr = rotating(0.0);
  const auto init = initial_approximation(pr, o.shock);
  const auto sup = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, o.shock.sup));
  const NonlinearScheme scheme(pr, init, sup, o.iter);
  const auto rep = scheme.residuals(scheme.initial_state());
  EXPECT_LE(rep.pde_residual, 1e-10);
  EXPECT_LE(rep.rh_residual, 1e-10);
  EXPECT_LE(rep.exit_residual, 1e-10);
  EXPECT_LE(rep.wall_residual, 1e-10);
}

TEST(Iteration, ShockViolationDetected) {
  auto o = coarse();
  o.shock.bracket.reset();
  const auto pr = rotating(0.0);
  const auto init = initial_approximation(pr, o.shock);
  const auto sup = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, o.shock.sup));
  const NonlinearScheme scheme(pr, init, sup, o.iter);
  const auto base = scheme.initial_state();
  // Raising the downstream entropy raises the downstream pressure at fixed velocity and B.
  std::vector<double> r;
  for (double eps : {1e-4, 2e-4}) {
    auto s = base;
    s.S.array() += eps;
    r.push_back(scheme.residuals(s).rh_residual);
  }
  EXPECT_GT(r[0], 1e-6);
  EXPECT_NEAR(r[1] / r[0], 2.0, 0.05);
}

TEST(Iteration, ConvergesWithContraction) {
  const auto pr = rotating(1e-3);
  const auto o = coarse();
  const auto r = run(pr, o);
  EXPECT_LE(r.log.size(), 20u);
  EXPECT_LE(r.report.pde_residual + r.report.rh_residual, 1e-6);
  EXPECT_LE(std::abs(r.report.defect), 1e-10);
  EXPECT_LE(r.log.back().update_norm, o.iter.tol_fp);
  // Geometric decay: each update well below the previous one until round-off.
  for (std::size_t k = 1; k < r.log.size(); ++k) {
    if (r.log[k - 1].update_norm > 1e-12) EXPECT_LT(r.log[k].update_norm, 0.5 * r.log[k - 1].update_norm);
  }
  const NonlinearScheme scheme(pr, r.init, r.supersonic, o.iter);
  EXPECT_LE(measure_contraction(scheme, r.state, 1e-6), 0.5);
  // The converged state is a fixed point.
  const auto again = scheme.apply_T(r.state);
  EXPECT_LE(state_distance(again, r.state, true), 1e-9);
}

TEST(Iteration, TrustRegionEnforced) {
  auto o = coarse();
  o.iter.trust_factor = 1e-6;
  EXPECT_EQ(kind_of([&] { run(rotating(1e-3), o); }), ErrorKind::TrustRegion);
}

TEST(Iteration, IterationCapReported) {
  auto o = coarse();
  o.iter.max_iter = 1;
  try {
    run(rotating(1e-3), o);
    FAIL() << "converged in one step";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_GT(e.value(), o.iter.tol_fp);
    EXPECT_NE(std::string(e.what()).find("updates:"), std::string::npos);
  }
}

TEST(Iteration, StateDistance) {
  const auto pr = rotating(1e-3);
  const auto o = coarse();
  const auto init = initial_approximation(pr, o.shock);
  const auto sup = std::make_shared<SupersonicSolution>(solve_nonlinear(pr, o.shock.sup));
  const NonlinearScheme scheme(pr, init, sup, o.iter);
  const auto a = scheme.initial_state();
  auto b = a;
  EXPECT_EQ(state_distance(a, b, true), 0.0);
  b.psi_sharp += 0.25;
  EXPECT_EQ(state_distance(a, b, false), 0.0);
  EXPECT_DOUBLE_EQ(state_distance(a, b, true), 0.25);
  b.U1(3, 4) -= 0.5;
  EXPECT_DOUBLE_EQ(state_distance(a, b, true), state_distance(b, a, true));
}

TEST(Iteration, EulerianHeightsMonotone) {
  const auto pr = rotating(1e-3);
  const auto r = run(pr, coarse());
  const auto X = eulerian_heights(pr, r.init.cols, r.state);
  for (int i = 0; i < X.rows(); ++i) {
    EXPECT_EQ(X(i, 0), 0.0);
    for (int j = 1; j < X.cols(); ++j) EXPECT_GT(X(i, j), X(i, j - 1));
    EXPECT_NEAR(X(i, X.cols() - 1), 1.0, 1e-2);
  }
}
