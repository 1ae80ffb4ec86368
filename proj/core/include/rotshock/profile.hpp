#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rotshock/numerics.hpp"

namespace rotshock {

// A scalar function of one variable with first and second derivatives. Built
// from ascending polynomial coefficients, a uniformly spaced table, or callables.
class Profile {
 public:
  Profile();  // identically zero

  static Profile constant(double c);
  static Profile poly(std::vector<double> coeffs);
  static Profile table(const std::vector<double>& x, const std::vector<double>& y);
  static Profile table_csv(const std::string& path);
  static Profile callable(std::function<double(double)> f, std::function<double(double)> df,
                          std::function<double(double)> d2f = nullptr);

  double operator()(double x) const { return f_(x); }
  double prime(double x) const { return df_(x); }
  double double_prime(double x) const { return d2f_(x); }

  bool is_poly() const { return kind_ == Kind::Poly; }
  bool is_table() const { return kind_ == Kind::Table; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::string& source() const { return source_; }

  // True when the profile is the zero polynomial.
  bool is_zero() const;

 private:
  enum class Kind { Poly, Table, Callable };
  Kind kind_ = Kind::Poly;
  std::vector<double> coeffs_;
  std::string source_;
  std::function<double(double)> f_, df_, d2f_;
};

}  // namespace rotshock
