#include <gtest/gtest.h>

#include <cmath>

#include "manufactured.hpp"
#include "rotshock/elliptic.hpp"
#include "rotshock/error.hpp"

using namespace rotshock;

namespace {
EllipticOptions projecting() {
  EllipticOptions o;
  o.project = true;
  return o;
}
}  // namespace

TEST(Elliptic, SecondOrderConvergence) {
  const auto p = manufactured::problem();
  const double e16 = manufactured::max_error(solve(p, 16, 16, projecting()));
  const double e32 = manufactured::max_error(solve(p, 32, 32, projecting()));
  const double e64 = manufactured::max_error(solve(p, 64, 64, projecting()));
  EXPECT_GE(e16 / e32, 3.5);
  EXPECT_LE(e16 / e32, 4.5);
  EXPECT_GE(e32 / e64, 3.5);
  EXPECT_LE(e32 / e64, 4.5);
}

TEST(Elliptic, NonSquareGrid) {
  const auto p = manufactured::problem();
  const double a = manufactured::max_error(solve(p, 24, 40, projecting()));
  const double b = manufactured::max_error(solve(p, 48, 80, projecting()));
  EXPECT_GE(a / b, 3.5);
  EXPECT_LE(a / b, 4.5);
}

TEST(Elliptic, TelescopingIdentity) {
  const auto p = manufactured::problem().discretize(33, 21);
  const auto& g = p.grid;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd v1 = Eigen::MatrixXd::Random(g.N + 1, g.M);
    Eigen::MatrixXd v2 = Eigen::MatrixXd::Random(g.N, g.M + 1);
    v1.row(0) = p.h1.transpose();
    v1.row(g.N) = p.h2.transpose();
    v2.col(0).setZero();
    v2.col(g.M) = p.h3;
    Eigen::MatrixXd r1;
    elliptic_residuals(p, v1, v2, &r1, nullptr);
    EXPECT_NEAR(r1.sum() * g.h1() * g.h2(), compatibility_defect(p), 1e-12);
  }
}

TEST(Elliptic, IncompatibleRejectedWithDefect) {
  auto p = manufactured::problem().discretize(32, 32);
  p.h2.array() += 0.02;
  const double delta = compatibility_defect(p);
  ASSERT_GT(std::abs(delta), 1e-3);
  try {
    solve(p);
    FAIL() << "incompatible data accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Incompatible);
    EXPECT_DOUBLE_EQ(e.value(), delta);
  }
}

TEST(Elliptic, ProjectionShiftMatchesDefect) {
  auto p = manufactured::problem().discretize(32, 32);
  p.h2.array() += 0.02;
  const double delta = compatibility_defect(p);
  const auto s = solve(p, projecting());
  double w = 0.0;
  for (int j = 0; j < p.grid.M; ++j) w += p.lam1(j) * p.grid.h2();
  EXPECT_NEAR(s.defect, delta, 1e-14);
  EXPECT_NEAR(s.shift, delta / w, 1e-12);
  EXPECT_LE(std::abs(s.projected_defect), 1e-12);
}

TEST(Elliptic, Linearity) {
  auto base = manufactured::problem().discretize(24, 24);
  auto q = base;
  // A second compatible problem: zero boundary data and a source with zero cell sum.
  q.h1.setZero();
  q.h2.setZero();
  q.h3.setZero();
  for (int i = 0; i < q.grid.N; ++i)
    for (int j = 0; j < q.grid.M; ++j) q.H1(i, j) = std::cos(3.0 * q.grid.z1(i + 0.5)) * std::sin(j);
  q.H1.array() -= q.H1.mean();
  for (int i = 1; i < q.grid.N; ++i)
    for (int j = 1; j < q.grid.M; ++j) q.H2(i, j) = std::sin(i * 0.3 + j * 0.7);
  ASSERT_LE(std::abs(compatibility_defect(q)), 1e-12);
  const double a = 0.7, b = -1.9;
  auto comb = base;
  comb.H1 = a * base.H1 + b * q.H1;
  comb.H2 = a * base.H2 + b * q.H2;
  comb.h1 = a * base.h1 + b * q.h1;
  comb.h2 = a * base.h2 + b * q.h2;
  comb.h3 = a * base.h3 + b * q.h3;
  const auto o = projecting();
  const auto s1 = solve(base, o), s2 = solve(q, o), s = solve(comb, o);
  EXPECT_LE((s.v1 - (a * s1.v1 + b * s2.v1)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((s.v2 - (a * s1.v2 + b * s2.v2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Elliptic, GaugeAndResiduals) {
  const auto s = solve(manufactured::problem(), 40, 40, projecting());
  EXPECT_LE(std::abs(s.hat_mean), 1e-12);
  EXPECT_LE(s.res1, 1e-9);
  EXPECT_LE(s.res2, 1e-9);
}

TEST(Elliptic, ReusedFactorizationMatches) {
  const auto p = manufactured::problem().discretize(32, 32);
  const EllipticSolver solver(p.grid, p.lam1, p.lam2, p.lam3, p.lam4, projecting());
  const auto a = solver.solve(p), b = solve(p, projecting());
  EXPECT_LE((a.v1 - b.v1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((a.v2 - b.v2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Elliptic, IterativeFallbackAgrees) {
  const auto p = manufactured::problem().discretize(32, 32);
  auto o = projecting();
  const auto direct = solve(p, o);
  o.direct_limit = 0;
  const auto cg = solve(p, o);
  EXPECT_GT(cg.cg_iterations, 0);
  EXPECT_LE((direct.v1 - cg.v1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((direct.v2 - cg.v2).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Elliptic, NonPositiveCoefficientRejected) {
  auto p = manufactured::problem().discretize(8, 8);
  p.lam3(2) = -1.0;
  EXPECT_THROW(solve(p, projecting()), Error);
}
