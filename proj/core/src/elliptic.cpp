#include "rotshock/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

namespace {

// Cell-centred Neumann operator -(d1 a d1 + d2 b d2), bordered with the mean
// constraint so the null space is removed without pinning a node.
class NeumannOp {
 public:
  NeumannOp(const EllipticGrid& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
            const EllipticOptions& opts)
      : g_(g), opts_(opts) {
    const int N = g.N, M = g.M;
    const long n = static_cast<long>(N) * M;
    const double i1 = 1.0 / (g.h1() * g.h1()), i2 = 1.0 / (g.h2() * g.h2());
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(n) * 6);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < M; ++j) {
        const long k = idx(i, j);
        double diag = 0.0;
        if (i > 0) {
          t.emplace_back(k, idx(i - 1, j), -a(j) * i1);
          diag += a(j) * i1;
        }
        if (i < N - 1) {
          t.emplace_back(k, idx(i + 1, j), -a(j) * i1);
          diag += a(j) * i1;
        }
        if (j > 0) {
          t.emplace_back(k, idx(i, j - 1), -b(j) * i2);
          diag += b(j) * i2;
        }
        if (j < M - 1) {
          t.emplace_back(k, idx(i, j + 1), -b(j + 1) * i2);
          diag += b(j + 1) * i2;
        }
        t.emplace_back(k, k, diag);
      }
    }
    direct_ = n <= opts.direct_limit;
    if (direct_) {
      std::vector<Trip> tb = t;
      for (long k = 0; k < n; ++k) {
        tb.emplace_back(k, n, 1.0);
        tb.emplace_back(n, k, 1.0);
      }
      SpMat A(n + 1, n + 1);
      A.setFromTriplets(tb.begin(), tb.end());
      lu_.analyzePattern(A);
      lu_.factorize(A);
      if (lu_.info() != Eigen::Success) {
        throw Error(ErrorKind::NonConvergence, "Neumann factorization failed");
      }
    } else {
      K_.resize(n, n);
      K_.setFromTriplets(t.begin(), t.end());
      cg_.setTolerance(opts.cg_tol);
      cg_.setMaxIterations(opts.cg_max_iter);
      cg_.compute(K_);
    }
  }

  // Solves K phi = rhs on the mean-zero subspace; rhs is cell-major (i, j).
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs, int* iters) const {
    const int N = g_.N, M = g_.M;
    const long n = static_cast<long>(N) * M;
    Eigen::VectorXd phi(n);
    if (direct_) {
      Eigen::VectorXd r(n + 1);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < M; ++j) r(idx(i, j)) = rhs(i, j);
      r(n) = 0.0;
      const Eigen::VectorXd x = lu_.solve(r);
      phi = x.head(n);
    } else {
      Eigen::VectorXd r(n);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < M; ++j) r(idx(i, j)) = rhs(i, j);
      r.array() -= r.mean();
      phi = cg_.solve(r);
      if (cg_.info() != Eigen::Success) {
        std::ostringstream os;
        os << "conjugate gradients did not converge in " << cg_.iterations()
           << " iterations, error " << cg_.error();
        throw Error(ErrorKind::NonConvergence, os.str(), cg_.error());
      }
      if (iters) *iters = static_cast<int>(cg_.iterations());
      phi.array() -= phi.mean();
    }
    Eigen::MatrixXd out(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) out(i, j) = phi(idx(i, j));
    return out;
  }

 private:
  long idx(int i, int j) const { return static_cast<long>(i) * g_.M + j; }
  EllipticGrid g_;
  EllipticOptions opts_;
  bool direct_ = true;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  SpMat K_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg_;
};

// Vertex-centred Dirichlet operator -(d1 a d1 + d2 b d2) on interior vertices.
class DirichletOp {
 public:
  DirichletOp(const EllipticGrid& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
              const EllipticOptions& opts)
      : g_(g), a_(a), b_(b) {
    const int ni = g.N - 1, nj = g.M - 1;
    const long n = static_cast<long>(ni) * nj;
    const double i1 = 1.0 / (g.h1() * g.h1()), i2 = 1.0 / (g.h2() * g.h2());
    std::vector<Trip> t;
    t.reserve(static_cast<std::size_t>(n) * 5);
    for (int i = 1; i <= ni; ++i) {
      for (int j = 1; j <= nj; ++j) {
        const long k = idx(i, j);
        const double ax = a(j) * i1;
        const double bs = b(j - 1) * i2, bn = b(j) * i2;
        t.emplace_back(k, k, 2.0 * ax + bs + bn);
        if (i > 1) t.emplace_back(k, idx(i - 1, j), -ax);
        if (i < ni) t.emplace_back(k, idx(i + 1, j), -ax);
        if (j > 1) t.emplace_back(k, idx(i, j - 1), -bs);
        if (j < nj) t.emplace_back(k, idx(i, j + 1), -bn);
      }
    }
    A_.resize(n, n);
    A_.setFromTriplets(t.begin(), t.end());
    direct_ = n <= opts.direct_limit;
    if (direct_) {
      ldlt_.compute(A_);
      if (ldlt_.info() != Eigen::Success) {
        throw Error(ErrorKind::NonConvergence, "Dirichlet factorization failed");
      }
    } else {
      cg_.setTolerance(opts.cg_tol);
      cg_.setMaxIterations(opts.cg_max_iter);
      cg_.compute(A_);  // the solver keeps a reference to A_
    }
  }

  // Solves d1(a d1 phi) + d2(b d2 phi) = f with phi = boundary on the boundary.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& f, const Eigen::MatrixXd& boundary,
                        int* iters) const {
    const int N = g_.N, M = g_.M;
    const double i1 = 1.0 / (g_.h1() * g_.h1()), i2 = 1.0 / (g_.h2() * g_.h2());
    Eigen::MatrixXd phi = boundary;
    if (N < 2 || M < 2) return phi;
    const long n = static_cast<long>(N - 1) * (M - 1);
    Eigen::VectorXd r(n);
    for (int i = 1; i < N; ++i) {
      for (int j = 1; j < M; ++j) {
        double v = -f(i, j);
        if (i == 1) v += a_(j) * i1 * boundary(0, j);
        if (i == N - 1) v += a_(j) * i1 * boundary(N, j);
        if (j == 1) v += b_(j - 1) * i2 * boundary(i, 0);
        if (j == M - 1) v += b_(j) * i2 * boundary(i, M);
        r(idx(i, j)) = v;
      }
    }
    Eigen::VectorXd x;
    if (direct_) {
      x = ldlt_.solve(r);
    } else {
      x = cg_.solve(r);
      if (cg_.info() != Eigen::Success) {
        std::ostringstream os;
        os << "conjugate gradients did not converge in " << cg_.iterations()
           << " iterations, error " << cg_.error();
        throw Error(ErrorKind::NonConvergence, os.str(), cg_.error());
      }
      if (iters) *iters = static_cast<int>(cg_.iterations());
    }
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < M; ++j) phi(i, j) = x(idx(i, j));
    return phi;
  }

 private:
  long idx(int i, int j) const { return static_cast<long>(i - 1) * (g_.M - 1) + (j - 1); }
  EllipticGrid g_;
  Eigen::VectorXd a_, b_;
  SpMat A_;
  bool direct_ = true;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg_;
};

void check_positive(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(v(k) > 0.0)) {
      throw Error(ErrorKind::Precondition, std::string("coefficient ") + name + " must be positive",
                  v(k));
    }
  }
}

}  // namespace

DiscreteEllipticProblem DiscreteEllipticProblem::zeros(const EllipticGrid& g) {
  DiscreteEllipticProblem p;
  p.grid = g;
  p.lam1 = Eigen::VectorXd::Ones(g.M);
  p.lam4 = Eigen::VectorXd::Ones(g.M);
  p.lam2 = Eigen::VectorXd::Ones(g.M + 1);
  p.lam3 = Eigen::VectorXd::Ones(g.M + 1);
  p.H1 = Eigen::MatrixXd::Zero(g.N, g.M);
  p.H2 = Eigen::MatrixXd::Zero(g.N + 1, g.M + 1);
  p.h1 = Eigen::VectorXd::Zero(g.M);
  p.h2 = Eigen::VectorXd::Zero(g.M);
  p.h3 = Eigen::VectorXd::Zero(g.N);
  return p;
}

void DiscreteEllipticProblem::validate() const {
  const int N = grid.N, M = grid.M;
  if (N < 2 || M < 2) throw Error(ErrorKind::Precondition, "elliptic grid too small", N);
  if (lam1.size() != M || lam4.size() != M || lam2.size() != M + 1 || lam3.size() != M + 1 ||
      H1.rows() != N || H1.cols() != M || H2.rows() != N + 1 || H2.cols() != M + 1 ||
      h1.size() != M || h2.size() != M || h3.size() != N) {
    throw Error(ErrorKind::Precondition, "elliptic data has inconsistent sizes");
  }
  check_positive(lam1, "lambda1");
  check_positive(lam2, "lambda2");
  check_positive(lam3, "lambda3");
  check_positive(lam4, "lambda4");
}

DiscreteEllipticProblem EllipticProblem::discretize(int N, int M) const {
  EllipticGrid g{L1, L2, m_bar, N, M};
  auto p = DiscreteEllipticProblem::zeros(g);
  const auto half = [&](int j) { return g.z2(j + 0.5); };
  for (int j = 0; j < M; ++j) {
    p.lam1(j) = lam1(half(j));
    p.lam4(j) = lam4(half(j));
    if (h1) p.h1(j) = h1(half(j));
    if (h2) p.h2(j) = h2(half(j));
  }
  for (int j = 0; j <= M; ++j) {
    p.lam2(j) = lam2(g.z2(j));
    p.lam3(j) = lam3(g.z2(j));
  }
  for (int i = 0; i < N; ++i) {
    if (h3) p.h3(i) = h3(g.z1(i + 0.5));
    for (int j = 0; j < M; ++j) {
      if (H1) p.H1(i, j) = H1(g.z1(i + 0.5), half(j));
    }
  }
  if (H2) {
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= M; ++j) p.H2(i, j) = H2(g.z1(i), g.z2(j));
  }
  return p;
}

double compatibility_defect(const DiscreteEllipticProblem& p) {
  const auto& g = p.grid;
  double walls = 0.0, top = 0.0, src = 0.0;
  for (int j = 0; j < g.M; ++j) walls += p.lam1(j) * (p.h2(j) - p.h1(j));
  for (int i = 0; i < g.N; ++i) top += p.h3(i);
  src = p.H1.sum();
  return walls * g.h2() + p.lam2(g.M) * top * g.h1() - src * g.h1() * g.h2();
}

double compatibility_defect(const EllipticProblem& p, int N, int M) {
  return compatibility_defect(p.discretize(N, M));
}

void elliptic_residuals(const DiscreteEllipticProblem& p, const Eigen::MatrixXd& v1,
                        const Eigen::MatrixXd& v2, Eigen::MatrixXd* r1, Eigen::MatrixXd* r2) {
  const auto& g = p.grid;
  const int N = g.N, M = g.M;
  const double h1 = g.h1(), h2 = g.h2();
  if (r1) {
    r1->resize(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j)
        (*r1)(i, j) = p.lam1(j) * (v1(i + 1, j) - v1(i, j)) / h1 +
                      (p.lam2(j + 1) * v2(i, j + 1) - p.lam2(j) * v2(i, j)) / h2 - p.H1(i, j);
  }
  if (r2) {
    r2->setZero(N + 1, M + 1);
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < M; ++j)
        (*r2)(i, j) = p.lam3(j) * (v2(i, j) - v2(i - 1, j)) / h1 -
                      (p.lam4(j) * v1(i, j) - p.lam4(j - 1) * v1(i, j - 1)) / h2 - p.H2(i, j);
  }
}

struct EllipticSolver::Impl {
  EllipticGrid grid;
  Eigen::VectorXd lam1, lam2, lam3, lam4;
  EllipticOptions opts;
  std::unique_ptr<NeumannOp> hat;
  std::unique_ptr<DirichletOp> check;
};

EllipticSolver::EllipticSolver(const EllipticGrid& g, const Eigen::VectorXd& lam1,
                               const Eigen::VectorXd& lam2, const Eigen::VectorXd& lam3,
                               const Eigen::VectorXd& lam4, const EllipticOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  check_positive(lam1, "lambda1");
  check_positive(lam2, "lambda2");
  check_positive(lam3, "lambda3");
  check_positive(lam4, "lambda4");
  impl_->grid = g;
  impl_->lam1 = lam1;
  impl_->lam2 = lam2;
  impl_->lam3 = lam3;
  impl_->lam4 = lam4;
  impl_->opts = opts;
  const Eigen::VectorXd a_hat = lam1.cwiseQuotient(lam4);
  const Eigen::VectorXd b_hat = lam2.cwiseQuotient(lam3);
  impl_->hat = std::make_unique<NeumannOp>(g, a_hat, b_hat, opts);
  const Eigen::VectorXd a_chk = lam3.cwiseQuotient(lam2);
  const Eigen::VectorXd b_chk = lam4.cwiseQuotient(lam1);
  impl_->check = std::make_unique<DirichletOp>(g, a_chk, b_chk, opts);
}

EllipticSolver::~EllipticSolver() = default;
EllipticSolver::EllipticSolver(EllipticSolver&&) noexcept = default;
EllipticSolver& EllipticSolver::operator=(EllipticSolver&&) noexcept = default;
const EllipticOptions& EllipticSolver::options() const { return impl_->opts; }
EllipticOptions& EllipticSolver::options() { return impl_->opts; }

EllipticSolution EllipticSolver::solve(const DiscreteEllipticProblem& p_in) const {
  p_in.validate();
  const auto& g = impl_->grid;
  if (p_in.grid.N != g.N || p_in.grid.M != g.M) {
    throw Error(ErrorKind::Precondition, "problem grid differs from the factorized grid");
  }
  if ((p_in.lam1 - impl_->lam1).cwiseAbs().maxCoeff() > 0.0 ||
      (p_in.lam2 - impl_->lam2).cwiseAbs().maxCoeff() > 0.0 ||
      (p_in.lam3 - impl_->lam3).cwiseAbs().maxCoeff() > 0.0 ||
      (p_in.lam4 - impl_->lam4).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorKind::Precondition, "problem coefficients differ from the factorized ones");
  }
  const int N = g.N, M = g.M;
  const double h1 = g.h1(), h2 = g.h2();
  EllipticSolution sol;
  sol.grid = g;
  DiscreteEllipticProblem p = p_in;
  sol.defect = compatibility_defect(p);
  const double defect_scale = 1.0;
  if (std::abs(sol.defect) > impl_->opts.defect_tol * defect_scale) {
    if (!impl_->opts.project) {
      std::ostringstream os;
      os << "incompatible elliptic data: defect " << sol.defect;
      throw Error(ErrorKind::Incompatible, os.str(), sol.defect);
    }
  }
  if (impl_->opts.project) {
    const double w = p.lam1.sum() * h2;
    sol.shift = sol.defect / w;
    p.h2.array() -= sol.shift;
  }
  sol.projected_defect = compatibility_defect(p);

  // Hat potential: cell-centred Neumann problem.
  Eigen::MatrixXd rhs(N, M);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < M; ++j) {
      double known = 0.0;
      if (i == 0) known -= p.lam1(j) * p.h1(j) / h1;
      if (i == N - 1) known += p.lam1(j) * p.h2(j) / h1;
      if (j == M - 1) known += p.lam2(M) * p.h3(i) / h2;
      rhs(i, j) = -(p.H1(i, j) - known);
    }
  }
  int iters = 0;
  const Eigen::MatrixXd phat = impl_->hat->solve(rhs, &iters);
  sol.hat_mean = phat.mean();

  // Check potential: vertex Dirichlet problem.
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(N + 1, M + 1);
  const Eigen::MatrixXd pchk = impl_->check->solve(p.H2, zero, &iters);
  sol.cg_iterations = iters;

  sol.v1.resize(N + 1, M);
  sol.v2.resize(N, M + 1);
  for (int j = 0; j < M; ++j) {
    sol.v1(0, j) = p.h1(j);
    sol.v1(N, j) = p.h2(j);
    for (int i = 1; i < N; ++i) {
      sol.v1(i, j) = (phat(i, j) - phat(i - 1, j)) / (h1 * p.lam4(j));
    }
    for (int i = 0; i <= N; ++i) {
      sol.v1(i, j) -= (pchk(i, j + 1) - pchk(i, j)) / (h2 * p.lam1(j));
    }
  }
  for (int i = 0; i < N; ++i) {
    sol.v2(i, 0) = 0.0;
    sol.v2(i, M) = p.h3(i);
    for (int j = 1; j < M; ++j) {
      sol.v2(i, j) = (phat(i, j) - phat(i, j - 1)) / (h2 * p.lam3(j));
    }
    for (int j = 0; j <= M; ++j) {
      sol.v2(i, j) += (pchk(i + 1, j) - pchk(i, j)) / (h1 * p.lam2(j));
    }
  }

  Eigen::MatrixXd r1, r2;
  elliptic_residuals(p, sol.v1, sol.v2, &r1, &r2);
  sol.res1 = r1.cwiseAbs().maxCoeff();
  sol.res2 = r2.cwiseAbs().maxCoeff();
  sol.corner_res1 = std::max({std::abs(r1(0, 0)), std::abs(r1(N - 1, 0)),
                              std::abs(r1(0, M - 1)), std::abs(r1(N - 1, M - 1))});
  sol.corner_res2 = std::max({std::abs(r2(1, 1)), std::abs(r2(N - 1, 1)),
                              std::abs(r2(1, M - 1)), std::abs(r2(N - 1, M - 1))});
  return sol;
}

EllipticSolution solve(const DiscreteEllipticProblem& p, const EllipticOptions& opts) {
  p.validate();
  EllipticSolver s(p.grid, p.lam1, p.lam2, p.lam3, p.lam4, opts);
  return s.solve(p);
}

EllipticSolution solve(const EllipticProblem& p, int N, int M, const EllipticOptions& opts) {
  return solve(p.discretize(N, M), opts);
}

Eigen::MatrixXd solve_scalar_neumann(const EllipticGrid& g, const Eigen::VectorXd& a,
                                     const Eigen::VectorXd& b, const Eigen::MatrixXd& f,
                                     const Eigen::VectorXd& flux_left,
                                     const Eigen::VectorXd& flux_right,
                                     const Eigen::VectorXd& flux_bottom,
                                     const Eigen::VectorXd& flux_top,
                                     const EllipticOptions& opts) {
  check_positive(a, "a");
  check_positive(b, "b");
  const int N = g.N, M = g.M;
  const double h1 = g.h1(), h2 = g.h2();
  double net = 0.0;
  for (int j = 0; j < M; ++j) net += (flux_right(j) - flux_left(j)) * h2;
  for (int i = 0; i < N; ++i) net += (flux_top(i) - flux_bottom(i)) * h1;
  const double defect = net - f.sum() * h1 * h2;
  if (std::abs(defect) > opts.defect_tol) {
    throw Error(ErrorKind::Incompatible, "incompatible Neumann data", defect);
  }
  NeumannOp op(g, a, b, opts);
  Eigen::MatrixXd rhs(N, M);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < M; ++j) {
      double known = 0.0;
      if (i == 0) known -= flux_left(j) / h1;
      if (i == N - 1) known += flux_right(j) / h1;
      if (j == 0) known -= flux_bottom(i) / h2;
      if (j == M - 1) known += flux_top(i) / h2;
      rhs(i, j) = -(f(i, j) - known);
    }
  }
  return op.solve(rhs, nullptr);
}

Eigen::MatrixXd solve_scalar_dirichlet(const EllipticGrid& g, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b, const Eigen::MatrixXd& f,
                                       const Eigen::MatrixXd& boundary,
                                       const EllipticOptions& opts) {
  check_positive(a, "a");
  check_positive(b, "b");
  DirichletOp op(g, a, b, opts);
  return op.solve(f, boundary, nullptr);
}

}  // namespace rotshock
