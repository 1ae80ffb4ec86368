#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace rotshock {

// Cubic B-spline through uniformly spaced samples. Evaluation outside the
// sampled interval is clamped to the nearest endpoint.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(std::vector<double> values, double a, double h);

  double operator()(double x) const;
  double prime(double x) const;
  double double_prime(double x) const;

  double a() const { return a_; }
  double b() const { return b_; }
  bool empty() const { return !impl_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::vector<double> samples_;
  double a_ = 0.0;
  double b_ = 0.0;
  double clamp(double x) const;
};

std::vector<double> linspace(double a, double b, std::size_t n);

// Running integral F(x_k) = int_{x_0}^{x_k} f on a uniform grid, fourth order at
// every node (composite Simpson on even nodes, three-point closure on odd ones).
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

// Integral over the whole grid with the same rule.
double integrate(const std::vector<double>& f, double h);

// Four-point Lagrange interpolation on uniform samples v[0..n-1] with v[k] at
// x0 + k h. The stencil is shifted inward near the ends.
double lagrange4(const double* v, std::size_t n, double x0, double h, double x);
double lagrange4_prime(const double* v, std::size_t n, double x0, double h, double x);

// Stencil weights for the same interpolant; returns the first index used.
std::size_t lagrange4_weights(std::size_t n, double x0, double h, double x, double w[4],
                              double dw[4] = nullptr);

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Bracketed root of f on [a, b]; f(a) and f(b) must differ in sign.
RootResult bracketed_root(const std::function<double(double)>& f, double a, double b,
                          double fa, double fb, int max_iter = 60);

}  // namespace rotshock
