#pragma once

#include <cmath>

#include "rotshock/elliptic.hpp"

// Smooth exact solution of the first-order system on [0.2, 1] x [0, 1.3].
namespace manufactured {

inline double l1(double y) { return 1.0 + 0.3 * y; }
inline double l2(double y) { return 2.0 - 0.5 * y; }
inline double l3(double y) { return 1.5 + 0.2 * y * y; }
inline double l4(double y) { return 0.8 + 0.1 * y; }
inline double v1(double x, double y) { return std::sin(2 * x) * std::cos(y) + x * y; }
inline double v1x(double x, double y) { return 2 * std::cos(2 * x) * std::cos(y) + y; }
inline double v1y(double x, double y) { return -std::sin(2 * x) * std::sin(y) + x; }
inline double v2(double x, double y) { return std::sin(1.5 * y) * std::exp(0.5 * x); }
inline double v2x(double x, double y) { return 0.5 * v2(x, y); }
inline double v2y(double x, double y) { return 1.5 * std::cos(1.5 * y) * std::exp(0.5 * x); }

inline rotshock::EllipticProblem problem() {
  rotshock::EllipticProblem p;
  p.L1 = 0.2;
  p.L2 = 1.0;
  p.m_bar = 1.3;
  p.lam1 = l1;
  p.lam2 = l2;
  p.lam3 = l3;
  p.lam4 = l4;
  p.H1 = [](double x, double y) { return l1(y) * v1x(x, y) - 0.5 * v2(x, y) + l2(y) * v2y(x, y); };
  p.H2 = [](double x, double y) { return l3(y) * v2x(x, y) - 0.1 * v1(x, y) - l4(y) * v1y(x, y); };
  p.h1 = [](double y) { return v1(0.2, y); };
  p.h2 = [](double y) { return v1(1.0, y); };
  p.h3 = [](double x) { return v2(x, 1.3); };
  return p;
}

inline double max_error(const rotshock::EllipticSolution& s) {
  const auto& g = s.grid;
  double e = 0.0;
  for (int i = 0; i <= g.N; ++i)
    for (int j = 0; j < g.M; ++j) e = std::max(e, std::abs(s.v1(i, j) - v1(g.z1(i), g.z2(j + 0.5))));
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j <= g.M; ++j) e = std::max(e, std::abs(s.v2(i, j) - v2(g.z1(i + 0.5), g.z2(j))));
  return e;
}

}  // namespace manufactured
