#pragma once

#include <Eigen/Core>
#include <vector>

#include "rotshock/problem.hpp"

namespace rotshock {

struct SupersonicOptions {
  int nx = 129;      // y1 nodes on [0, L]
  int ny = 65;       // y2 nodes on [0, m_bar]
  int substeps = 0;  // per y1 cell; 0 picks the smallest stable count
  double cfl = 0.9;  // fraction of the RK4 stability bound
  double newton_tol = 1e-14;
};

enum class SolveKind { Linear, Nonlinear };

// Staggered marching grid: u1, S, B at half rows y2 = (j + 1/2) h2 (M values),
// u2 at node rows y2 = j h2 (M + 1 values), one column per y1 node.
struct SupersonicSolution {
  SolveKind kind = SolveKind::Linear;
  int nx = 0, M = 0;
  double L = 1.0, m_bar = 1.0, m = 1.0;
  Eigen::MatrixXd u1;  // nx x M      (perturbation for the linear solve)
  Eigen::MatrixXd u2;  // nx x (M + 1)
  Eigen::VectorXd S, B;  // M, constant along y1
  int picard_iters = 1;
  double final_update = 0.0;
  int substeps = 1;
  double min_mach2 = 0.0;  // min of M1^2 + M2^2 (nonlinear only)

  double h1() const { return L / (nx - 1); }
  double h2() const { return m_bar / M; }
  double y2_half(int j) const { return (j + 0.5) * h2(); }
  double y2_node(int j) const { return j * h2(); }

  // Cubic interpolation in y1 of one half row / node row, and its y1 derivative.
  double u1_at(double y1, int j) const;
  double u2_at(double y1, int j) const;
  double du1_at(double y1, int j) const;
  double du2_at(double y1, int j) const;
};

// (S, B) on the half rows: background plus sigma times the reparametrized inflow.
void transport_SB(const Problem& pr, int M, bool linear, Eigen::VectorXd& S, Eigen::VectorXd& B);

SupersonicSolution solve_linear(const Problem& pr, const SupersonicOptions& opts = {});
SupersonicSolution solve_nonlinear(const Problem& pr, const SupersonicOptions& opts = {});

struct FluxIdentityReport {
  std::vector<double> y1;
  std::vector<double> discrete;  // sum_j b1- u1 h2 at each column
  std::vector<double> exact;     // sigma int b1- u1_en - sigma b2-(m) u-(m) g(y1)
  double max_violation = 0.0;
};

FluxIdentityReport flux_identity(const Problem& pr, const SupersonicSolution& lin);

}  // namespace rotshock
