#include "rotshock/numerics.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "rotshock/error.hpp"

namespace rotshock {

struct UniformSpline::Impl {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
  // Fourth-order one-sided endpoint slopes; the library default is less accurate.
  Impl(const std::vector<double>& v, double a, double h)
      : spline(v.data(), v.size(), a, h, end_slope(v.data(), 1, h),
               end_slope(v.data() + v.size() - 1, -1, h)) {}

  static double end_slope(const double* v, int step, double h) {
    const auto f = [&](int k) { return v[k * step]; };
    return step * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h);
  }
};

UniformSpline::UniformSpline(std::vector<double> values, double a, double h)
    : samples_(std::move(values)), a_(a), b_(a + h * static_cast<double>(samples_.size() - 1)) {
  if (samples_.size() < 5) {
    throw Error(ErrorKind::Precondition, "spline needs at least 5 samples",
                static_cast<double>(samples_.size()));
  }
  impl_ = std::make_shared<const Impl>(samples_, a, h);
}

double UniformSpline::clamp(double x) const { return std::min(std::max(x, a_), b_); }

double UniformSpline::operator()(double x) const { return impl_->spline(clamp(x)); }
double UniformSpline::prime(double x) const { return impl_->spline.prime(clamp(x)); }
double UniformSpline::double_prime(double x) const {
  return impl_->spline.double_prime(clamp(x));
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = a;
    return x;
  }
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) x[k] = a + h * static_cast<double>(k);
  x[n - 1] = b;
  return x;
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n == 2) {
    F[1] = 0.5 * h * (f[0] + f[1]);
    return F;
  }
  for (std::size_t k = 2; k < n; k += 2) {
    F[k] = F[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  }
  for (std::size_t k = 1; k < n; k += 2) {
    // F(x_{k}) = F(x_{k-1}) + int over one interval using the three nodes around it
    if (k + 1 < n) {
      F[k] = F[k - 1] + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
    } else {
      F[k] = F[k - 1] + h / 12.0 * (5.0 * f[k] + 8.0 * f[k - 1] - f[k - 2]);
    }
  }
  return F;
}

double integrate(const std::vector<double>& f, double h) {
  return cumulative_integral(f, h).back();
}

std::size_t lagrange4_weights(std::size_t n, double x0, double h, double x, double w[4],
                              double dw[4]) {
  if (n < 4) throw Error(ErrorKind::Precondition, "need at least 4 samples", n);
  const double t = (x - x0) / h;
  long k = static_cast<long>(std::floor(t)) - 1;
  k = std::max(0L, std::min(k, static_cast<long>(n) - 4));
  const double s = t - static_cast<double>(k);  // local coordinate, nodes at 0,1,2,3
  const double nodes[4] = {0.0, 1.0, 2.0, 3.0};
  for (int a = 0; a < 4; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= s - nodes[b];
      den *= nodes[a] - nodes[b];
    }
    w[a] = num / den;
    if (dw) {
      double d = 0.0;
      for (int c = 0; c < 4; ++c) {
        if (c == a) continue;
        double p = 1.0;
        for (int b = 0; b < 4; ++b) {
          if (b == a || b == c) continue;
          p *= s - nodes[b];
        }
        d += p;
      }
      dw[a] = d / den / h;
    }
  }
  return static_cast<std::size_t>(k);
}

double lagrange4(const double* v, std::size_t n, double x0, double h, double x) {
  double w[4];
  const std::size_t k = lagrange4_weights(n, x0, h, x, w);
  return w[0] * v[k] + w[1] * v[k + 1] + w[2] * v[k + 2] + w[3] * v[k + 3];
}

double lagrange4_prime(const double* v, std::size_t n, double x0, double h, double x) {
  double w[4], dw[4];
  const std::size_t k = lagrange4_weights(n, x0, h, x, w, dw);
  return dw[0] * v[k] + dw[1] * v[k + 1] + dw[2] * v[k + 2] + dw[3] * v[k + 3];
}

RootResult bracketed_root(const std::function<double(double)>& f, double a, double b,
                          double fa, double fb, int max_iter) {
  RootResult r;
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "root is not bracketed", fa);
  }
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto tol = [](double x, double y) {
    return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(1.0, std::max(std::abs(x), std::abs(y)));
  };
  const auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  const double x1 = res.first, x2 = res.second;
  const double f1 = f(x1), f2 = f(x2);
  r.x = std::abs(f1) <= std::abs(f2) ? x1 : x2;
  r.fx = std::abs(f1) <= std::abs(f2) ? f1 : f2;
  r.iterations = static_cast<int>(iters);
  return r;
}

}  // namespace rotshock
