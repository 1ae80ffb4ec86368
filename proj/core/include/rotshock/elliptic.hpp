#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

namespace rotshock {

// Rectangle [L1, L2] x [0, m_bar] split into N x M cells. v1 lives on the
// vertical cell faces (i, j+1/2), v2 on the horizontal faces (i+1/2, j).
struct EllipticGrid {
  double L1 = 0.0, L2 = 1.0, m_bar = 1.0;
  int N = 8, M = 8;
  double h1() const { return (L2 - L1) / N; }
  double h2() const { return m_bar / M; }
  double z1(double i) const { return L1 + h1() * i; }
  double z2(double j) const { return h2() * j; }
};

// Data sampled on the staggered grid.
//   lam1, lam4, h1, h2: M values at half rows y2 = (j + 1/2) h2
//   lam2, lam3:         M + 1 values at node rows y2 = j h2
//   h3:                 N values at (i + 1/2) h1 on the top wall
//   H1:                 N x M cell centres
//   H2:                 (N + 1) x (M + 1) vertices (only interior ones enter)
struct DiscreteEllipticProblem {
  EllipticGrid grid;
  Eigen::VectorXd lam1, lam2, lam3, lam4;
  Eigen::MatrixXd H1, H2;
  Eigen::VectorXd h1, h2, h3;

  static DiscreteEllipticProblem zeros(const EllipticGrid& g);
  void validate() const;
};

// Continuous data; sampled at the staggered points by discretize().
struct EllipticProblem {
  double L1 = 0.0, L2 = 1.0, m_bar = 1.0;
  std::function<double(double)> lam1, lam2, lam3, lam4;
  std::function<double(double, double)> H1, H2;
  std::function<double(double)> h1, h2, h3;

  DiscreteEllipticProblem discretize(int N, int M) const;
};

struct EllipticOptions {
  double defect_tol = 1e-10;
  bool project = false;
  // Use conjugate gradients above this many unknowns.
  long direct_limit = 400000;
  double cg_tol = 1e-13;
  int cg_max_iter = 20000;
};

struct EllipticSolution {
  EllipticGrid grid;
  Eigen::MatrixXd v1;  // (N + 1) x M
  Eigen::MatrixXd v2;  // N x (M + 1)
  double defect = 0.0;            // before projection
  double projected_defect = 0.0;  // after projection
  double shift = 0.0;             // constant removed from h2 (defect / sum lam1 h2)
  double res1 = 0.0, res2 = 0.0;  // max discrete residuals of the two equations
  double corner_res1 = 0.0, corner_res2 = 0.0;
  double hat_mean = 0.0;
  int cg_iterations = 0;
};

// Left-hand side minus right-hand side of the solvability condition, with the
// same midpoint sums the assembly uses.
double compatibility_defect(const DiscreteEllipticProblem& p);
double compatibility_defect(const EllipticProblem& p, int N, int M);

// Residuals of both first-order equations for a given (v1, v2); boundary values
// are taken from v itself.
void elliptic_residuals(const DiscreteEllipticProblem& p, const Eigen::MatrixXd& v1,
                        const Eigen::MatrixXd& v2, Eigen::MatrixXd* r1, Eigen::MatrixXd* r2);

// Factorizes the two potential problems once for fixed coefficients.
class EllipticSolver {
 public:
  EllipticSolver(const EllipticGrid& g, const Eigen::VectorXd& lam1, const Eigen::VectorXd& lam2,
                 const Eigen::VectorXd& lam3, const Eigen::VectorXd& lam4,
                 const EllipticOptions& opts = {});
  ~EllipticSolver();
  EllipticSolver(EllipticSolver&&) noexcept;
  EllipticSolver& operator=(EllipticSolver&&) noexcept;

  EllipticSolution solve(const DiscreteEllipticProblem& p) const;
  const EllipticOptions& options() const;
  EllipticOptions& options();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

EllipticSolution solve(const DiscreteEllipticProblem& p, const EllipticOptions& opts = {});
EllipticSolution solve(const EllipticProblem& p, int N, int M, const EllipticOptions& opts = {});

// Scalar divergence-form problems d1(a d1 phi) + d2(b d2 phi) = f.
// Neumann: phi at cell centres, a at half rows (M), b at node rows (M + 1), the
// outward-signed fluxes a d1 phi on the left/right walls (M each) and b d2 phi on
// the bottom/top walls (N each); returns the mean-zero solution.
Eigen::MatrixXd solve_scalar_neumann(const EllipticGrid& g, const Eigen::VectorXd& a,
                                     const Eigen::VectorXd& b, const Eigen::MatrixXd& f,
                                     const Eigen::VectorXd& flux_left,
                                     const Eigen::VectorXd& flux_right,
                                     const Eigen::VectorXd& flux_bottom,
                                     const Eigen::VectorXd& flux_top,
                                     const EllipticOptions& opts = {});
// Dirichlet: phi at vertices ((N + 1) x (M + 1)), a at node rows, b at half rows;
// boundary entries of `boundary` are imposed, f is used at interior vertices.
Eigen::MatrixXd solve_scalar_dirichlet(const EllipticGrid& g, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b, const Eigen::MatrixXd& f,
                                       const Eigen::MatrixXd& boundary,
                                       const EllipticOptions& opts = {});

}  // namespace rotshock
