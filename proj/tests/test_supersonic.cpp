#include <gtest/gtest.h>

#include <cmath>

#include "rotshock/error.hpp"
#include "rotshock/supersonic.hpp"

using namespace rotshock;

namespace {

Problem problem(double sigma, bool wall = true) {
  GasModel gas{1.4, 0.1};
  UpstreamSpec up;
  up.u_minus = Profile::poly({2.0, 0.0, 0.1});
  Geometry geo;
  geo.sigma = sigma;
  if (wall) geo.g = Profile::poly({0, 0, 0, 0, 1.0});
  Perturbation p;
  p.u1_en = Profile::poly({0.3, 0.2});
  p.u2_en = Profile::poly({0.0, 1.0, -1.0});
  p.S_en = Profile::poly({0.1, 0.0, 0.2});
  p.B_en = Profile::poly({0.2, -0.1});
  return Problem::build(gas, up, geo, p, 513);
}

SupersonicOptions grid(int nx, int ny) {
  SupersonicOptions o;
  o.nx = nx;
  o.ny = ny;
  return o;
}

}  // namespace

TEST(Supersonic, UnperturbedIsBackground) {
  const auto pr = problem(0.0);
  const auto s = solve_nonlinear(pr, grid(33, 17));
  for (int j = 0; j < s.M; ++j) {
    for (int i = 1; i < s.nx; ++i) EXPECT_NEAR(s.u1(i, j), s.u1(0, j), 1e-12);
    const auto h = pr.hb->minus(s.y2_half(j));
    EXPECT_NEAR(s.u1(0, j), h.u, 1e-3);
  }
  EXPECT_LE(s.u2.cwiseAbs().maxCoeff(), 1e-12);
  const auto lin = solve_linear(pr, grid(33, 17));
  EXPECT_EQ(lin.u1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(lin.u2.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Supersonic, LinearScalesWithSigma) {
  const auto a = solve_linear(problem(1e-3), grid(33, 17));
  const auto b = solve_linear(problem(2e-3), grid(33, 17));
  const double n = a.u1.cwiseAbs().maxCoeff() + a.u2.cwiseAbs().maxCoeff();
  ASSERT_GT(n, 0.0);
  EXPECT_LE((b.u1 - 2 * a.u1).cwiseAbs().maxCoeff(), 1e-12 * n);
  EXPECT_LE((b.u2 - 2 * a.u2).cwiseAbs().maxCoeff(), 1e-12 * n);
  EXPECT_LE((b.S - 2 * a.S).cwiseAbs().maxCoeff(), 1e-12 * n);
}

TEST(Supersonic, StaysSupersonic) {
  const auto s = solve_nonlinear(problem(1e-2), grid(65, 33));
  EXPECT_GT(s.min_mach2, 1.0);
}

TEST(Supersonic, WallCondition) {
  const auto pr = problem(1e-2);
  const auto s = solve_nonlinear(pr, grid(65, 33));
  const int M = s.M;
  double worst = 0.0;
  for (int i = 0; i < s.nx; ++i) {
    const double y1 = i * s.h1();
    // Top value of u1 extrapolated from the three nearest half rows.
    const double top = (15.0 * s.u1(i, M - 1) - 10.0 * s.u1(i, M - 2) + 3.0 * s.u1(i, M - 3)) / 8.0;
    worst = std::max(worst, std::abs(s.u2(i, M) / top - pr.sigma() * pr.geo.g.prime(y1)));
  }
  EXPECT_LE(worst, 1e-3 * pr.sigma());
  for (int i = 0; i < s.nx; ++i) EXPECT_EQ(s.u2(i, 0), 0.0);
}

TEST(Supersonic, FluxIdentitySecondOrder) {
  const auto pr = problem(1e-3);
  std::vector<double> C;
  for (int r : {1, 2, 4}) {
    const auto lin = solve_linear(pr, grid(32 * r + 1, 16 * r + 1));
    const double h = lin.h2();
    C.push_back(flux_identity(pr, lin).max_violation / (h * h));
  }
  EXPECT_GT(C[0], 0.0);
  for (double c : C) EXPECT_NEAR(c / C[2], 1.0, 0.25);
}

TEST(Supersonic, FluxIdentityNeedsLinear) {
  const auto pr = problem(1e-3);
  EXPECT_THROW(flux_identity(pr, solve_nonlinear(pr, grid(17, 9))), Error);
}

TEST(Supersonic, NonlinearMinusLinearIsQuadratic) {
  const auto o = grid(33, 17);
  const auto bg = solve_nonlinear(problem(0.0), o);
  double prev = 0.0;
  for (double s : {4e-3, 2e-3, 1e-3}) {
    const auto pr = problem(s);
    const auto nl = solve_nonlinear(pr, o), lin = solve_linear(pr, o);
    const double e = std::max((nl.u1 - bg.u1 - lin.u1).cwiseAbs().maxCoeff(),
                              (nl.u2 - bg.u2 - lin.u2).cwiseAbs().maxCoeff());
    if (prev > 0.0) EXPECT_NEAR(prev / e, 4.0, 0.4);
    prev = e;
  }
}

TEST(Supersonic, CflViolationReported) {
  auto o = grid(5, 257);
  o.substeps = 1;
  try {
    solve_linear(problem(1e-3), o);
    FAIL() << "coarse y1 step accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Cfl);
    EXPECT_GT(e.value(), 0.0);
  }
}

TEST(Supersonic, TinyGridRejected) {
  EXPECT_THROW(solve_linear(problem(1e-3), grid(3, 3)), Error);
}
