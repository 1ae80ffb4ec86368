#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "rotshock/elliptic.hpp"
#include "rotshock/problem.hpp"
#include "rotshock/shockfit.hpp"
#include "rotshock/supersonic.hpp"

namespace rotshock {

// Map between the physical Lagrangian rectangle behind the front and the fixed
// rectangle [psi_bar, L] x [0, m_bar]:
//   y1 = Y1(z1, z2) = z1 + (L - z1)/(L - psi_bar) (psi(z2) - psi_bar).
// psi is the exact integral of the piecewise-linear slope.
class CoordinateMap {
 public:
  CoordinateMap(const ShockFront& front, double L);

  double psi(double z2) const;
  double psi_prime(double z2) const;
  double Y1(double z1, double z2) const;
  double z1(double y1, double y2) const;
  double jacobian(double z2) const;  // dY1/dz1 = (L - psi)/(L - psi_bar)
  double Y1_z2(double z1, double z2) const;

 private:
  ShockFront front_;
  Eigen::VectorXd nodes_;
  double L_;
};

CoordinateMap fix_coordinates(const ShockFront& front, double L);

// Subsonic iterate on the fixed rectangle; all fields are perturbations of the
// downstream background columns.
struct IterationState {
  EllipticGrid grid;
  Eigen::MatrixXd U1;  // (N + 1) x M
  Eigen::MatrixXd U2;  // N x (M + 1)
  Eigen::VectorXd S;   // M
  Eigen::VectorXd B;   // M, fixed by the upstream Bernoulli
  Eigen::VectorXd psi_prime;  // M + 1
  double psi_bar = 0.0;
  double psi_sharp = 0.0;
  int iter = 0;
  double update_norm = 0.0;

  ShockFront front(double m_bar) const;
};

// Max-norm distance over U1, U2, S, psi'; psi_sharp is added when asked.
double state_distance(const IterationState& a, const IterationState& b, bool with_sharp);

struct StepData {
  DiscreteEllipticProblem problem;  // H1, H2 are the full sources; h1..h3 the boundary data
  Eigen::VectorXd S_star;           // entropy behind the front (perturbation), half rows
  Eigen::VectorXd G0;               // slope jump condition at node rows
  Eigen::MatrixXd N1, N3;           // nonlinear residuals of the current iterate
  double defect = 0.0;
  double defect_scale = 0.0;
};

struct ResidualReport {
  double pde_residual = 0.0;
  double rh_residual = 0.0;
  double exit_residual = 0.0;
  double wall_residual = 0.0;
  double defect = 0.0;
};

struct IterationOptions {
  double tol_fp = 1e-10;
  int max_iter = 50;
  double trust_factor = 100.0;  // radius = factor * sigma^(3/2)
  bool enforce_trust = true;
  double defect_tol = 1e-10;
};

struct IterationLogEntry {
  int iter = 0;
  double update_norm = 0.0;
  double psi_sharp = 0.0;
  double defect = 0.0;
  double kappa = 0.0;
};

// One fixed-point scheme for a given problem, initial approximation and
// nonlinear supersonic solution. The elliptic operator is factorized once.
class NonlinearScheme {
 public:
  NonlinearScheme(const Problem& pr, const InitialApproximation& init,
                  std::shared_ptr<const SupersonicSolution> sup, const IterationOptions& opts);
  ~NonlinearScheme();
  NonlinearScheme(NonlinearScheme&&) noexcept;

  IterationState initial_state() const;
  StepData assemble_step_data(const IterationState& s, double psi_sharp) const;
  double solve_psi_sharp(const IterationState& s) const;
  IterationState apply_T(const IterationState& s) const;
  ResidualReport residuals(const IterationState& s) const;

  const SubsonicColumns& columns() const;
  const SupersonicSolution& supersonic() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RunOptions {
  ShockfitOptions shock;
  IterationOptions iter;
};

struct RunResult {
  InitialApproximation init;
  std::shared_ptr<const SupersonicSolution> supersonic;
  IterationState state;
  ShockFront front;
  ResidualReport report;
  std::vector<IterationLogEntry> log;
  double kappa = 0.0;  // largest contraction ratio above the round-off floor
  double C1 = 0.0;     // |psi_sharp| / sigma
};

RunResult run(const Problem& pr, const RunOptions& opts);

// |T(s) - T(s + eps phi)| / |eps phi| for a fixed smooth perturbation phi of
// U1, U2 (vanishing on the bottom and top walls) and psi'. psi_sharp is re-solved
// inside T and is left out of the output distance.
double measure_contraction(const NonlinearScheme& scheme, const IterationState& s, double eps);

// Physical heights x2 of the downstream field at the subsonic x-face columns.
Eigen::MatrixXd eulerian_heights(const Problem& pr, const SubsonicColumns& cols,
                                 const IterationState& s);

}  // namespace rotshock
