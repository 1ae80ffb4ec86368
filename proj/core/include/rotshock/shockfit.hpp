#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotshock/elliptic.hpp"
#include "rotshock/problem.hpp"
#include "rotshock/supersonic.hpp"

namespace rotshock {

// Downstream background sampled on the subsonic grid (M half rows), with the
// coefficients of the two first-order equations. The b profiles are taken in
// closed form from the same thermodynamic samples the nonlinear residuals use:
//   b1 = u(0)(1 - M^2)/(rho u^2), b2 = u(0)/u, b3 = 1/(rho u)(0), b4 = rho u/(rho u)(0).
struct SubsonicColumns {
  int M = 0;
  double h2 = 0.0, m_bar = 0.0;
  Eigen::VectorXd u, rho, P, S, B, c2;  // half rows
  Eigen::VectorXd u_node;               // node rows; interior values are half-row averages
  Eigen::VectorXd P_jump;               // [P] = P+ - P- at node rows
  Eigen::VectorXd lam1, lam2, lam3, lam4;
  double u0 = 0.0, rhou0 = 0.0;
};

SubsonicColumns subsonic_columns(const Problem& pr, int M);

// Solvability functionals of the linear problem: the elliptic defect at base
// position psi equals sigma (J1(psi) - J2) for the discrete data built below.
class JFunctionals {
 public:
  JFunctionals(const Problem& pr, const SubsonicColumns& cols,
               std::shared_ptr<const SupersonicSolution> lin);

  double J1(double psi) const;
  double J1_prime(double psi) const;
  double J2() const { return J2_; }
  // Weight (a3 - a1) b1+ h2 per half row, before the 1/sigma factor.
  const Eigen::VectorXd& weights() const { return w_; }
  double top() const { return top_; }

 private:
  const Problem* pr_;
  std::shared_ptr<const SupersonicSolution> lin_;
  Eigen::VectorXd w_;
  double top_ = 0.0, inv_sigma_ = 0.0, J2_ = 0.0;
};

struct ShockSelection {
  double psi_bar = 0.0;
  double J2 = 0.0;
  double J1_at_psi_bar = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int condition = 0;         // +1 for increasing J1, -1 for decreasing, 0 user bracket
  double I = 0.0;            // int ((b1+ (a3 - a1)/b1-)' b2- u2_en)
  double C_minus = 0.0;      // measured ||V-|| / (sigma (||V_en|| + ||g'||))
  double frak_F = 0.0;
  double L_star = 0.0;
  double J_star = 0.0;       // guaranteed rise of J1 over the bracket
  bool bracket_admissible = false;  // J2 strictly inside (J1(0), J1(0) + J_star)
  int iterations = 0;
};

struct ShockfitOptions {
  SupersonicOptions sup;
  double defect_tol = 1e-10;
  std::optional<std::pair<double, double>> bracket;
  double bracket_fraction = 0.95;  // L+ = fraction * min(L*, L)
  int samples = 64;
  double root_tol = 1e-10;
  // Base position used when sigma = 0 (any position is a solution then).
  std::optional<double> psi_bar_unperturbed;
};

// Bracket, monotonicity direction and the bound quantities, without the root.
ShockSelection selection_bracket(const Problem& pr, const JFunctionals& J,
                                 const SupersonicSolution& lin, const ShockfitOptions& opts);

// Root of J1(psi) = J2 on the computed (or user) bracket.
ShockSelection find_shock_position(const Problem& pr, const JFunctionals& J,
                                   const SupersonicSolution& lin, const ShockfitOptions& opts);

// Scalar version used for property tests: root of J1 = J2 on [a, b].
double find_root_monotone(const std::function<double(double)>& J1, double J2, double a, double b,
                          int samples = 64, double tol = 1e-10, int* iterations = nullptr);

// Subsonic perturbation (u1, u2 staggered; S, B per half row) on [psi_bar, L].
struct SubsonicField {
  EllipticGrid grid;
  Eigen::MatrixXd u1;  // (N + 1) x M
  Eigen::MatrixXd u2;  // N x (M + 1)
  Eigen::VectorXd S, B;
  double defect = 0.0;
};

int subsonic_cells(const Problem& pr, double psi_bar, int nx);

// Discrete elliptic problem of the linearized subsonic flow behind a straight
// front at psi_bar, with the first-order entropy and Bernoulli perturbations.
struct LinearSubsonicData {
  DiscreteEllipticProblem problem;
  Eigen::VectorXd S, B;
};

LinearSubsonicData assemble_linear_subsonic(const Problem& pr, const SubsonicColumns& cols,
                                            const SupersonicSolution& lin, double psi_bar,
                                            int N);

SubsonicField solve_linear_subsonic(const Problem& pr, const SubsonicColumns& cols,
                                    const SupersonicSolution& lin, double psi_bar, int N,
                                    const EllipticOptions& eopts = {});

// u2+ on the shock at node row j from the first three face values.
double shock_trace_u2(const Eigen::MatrixXd& u2, int j);

// Slope of the linear front at node rows: (m/(m_bar [P])) (u2+ - u2-)(psi_bar, .).
Eigen::VectorXd shock_slope(const SubsonicField& plus, const SupersonicSolution& minus,
                            double psi_bar, const SubsonicColumns& cols, double m, double m_bar);

struct ShockFront {
  double psi_bar = 0.0;
  double psi_sharp = 0.0;       // psi(m_bar) - psi_bar
  Eigen::VectorXd psi_prime;    // node rows
  double m_bar = 1.0;

  int M() const { return static_cast<int>(psi_prime.size()) - 1; }
  double h2() const { return m_bar / M(); }
  // psi = psi_bar + psi_sharp - int_{y}^{m_bar} psi', trapezoidal at nodes.
  Eigen::VectorXd nodes() const;
  Eigen::VectorXd half_rows() const;
  Eigen::VectorXd slope_half_rows() const;
};

struct InitialApproximation {
  std::shared_ptr<const SupersonicSolution> V_minus;
  SubsonicField V_plus;
  ShockFront front;
  ShockSelection selection;
  SubsonicColumns cols;
  double amplification = 0.0;  // (||V+|| + ||psi'||) / (sigma (||V_en|| + ||g'||))
};

InitialApproximation initial_approximation(const Problem& pr, const ShockfitOptions& opts = {});

// max |u1_en|, |u2_en|, |S_en|, |B_en| on [0, 1] plus max |g'| on [0, L].
double data_norm(const Problem& pr);

}  // namespace rotshock
