#include "rotshock/profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

namespace {

double horner(const std::vector<double>& c, double x, int deriv) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(deriv);) {
    double factor = 1.0;
    for (int d = 0; d < deriv; ++d) factor *= static_cast<double>(k - static_cast<std::size_t>(d));
    r = r * x + factor * c[k];
  }
  return r;
}

}  // namespace

Profile::Profile()
    : f_([](double) { return 0.0; }),
      df_([](double) { return 0.0; }),
      d2f_([](double) { return 0.0; }) {}

Profile Profile::constant(double c) { return poly({c}); }

Profile Profile::poly(std::vector<double> coeffs) {
  Profile p;
  p.kind_ = Kind::Poly;
  p.coeffs_ = std::move(coeffs);
  auto c = std::make_shared<const std::vector<double>>(p.coeffs_);
  p.f_ = [c](double x) { return horner(*c, x, 0); };
  p.df_ = [c](double x) { return horner(*c, x, 1); };
  p.d2f_ = [c](double x) { return horner(*c, x, 2); };
  return p;
}

Profile Profile::table(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 5) {
    throw Error(ErrorKind::Config, "table needs at least 5 (x, y) rows",
                static_cast<double>(x.size()));
  }
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorKind::Config, "table abscissae must increase", h);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double expect = x.front() + h * static_cast<double>(k);
    if (std::abs(x[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw Error(ErrorKind::Config, "table abscissae must be uniformly spaced", x[k]);
    }
  }
  Profile p;
  p.kind_ = Kind::Table;
  UniformSpline s(y, x.front(), h);
  p.f_ = [s](double t) { return s(t); };
  p.df_ = [s](double t) { return s.prime(t); };
  p.d2f_ = [s](double t) { return s.double_prime(t); };
  return p;
}

Profile Profile::table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open table file " + path);
  std::vector<double> x, y;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (x.empty()) continue;  // header row
      throw Error(ErrorKind::Config, "malformed row in " + path + ": " + line);
    }
    x.push_back(a);
    y.push_back(b);
  }
  Profile p = table(x, y);
  p.source_ = path;
  return p;
}

Profile Profile::callable(std::function<double(double)> f, std::function<double(double)> df,
                          std::function<double(double)> d2f) {
  Profile p;
  p.kind_ = Kind::Callable;
  p.f_ = std::move(f);
  p.df_ = std::move(df);
  if (d2f) {
    p.d2f_ = std::move(d2f);
  } else {
    auto d = p.df_;
    p.d2f_ = [d](double x) {
      const double e = 1e-5 * std::max(1.0, std::abs(x));
      return (d(x + e) - d(x - e)) / (2.0 * e);
    };
  }
  return p;
}

bool Profile::is_zero() const {
  if (kind_ != Kind::Poly) return false;
  for (double c : coeffs_) {
    if (c != 0.0) return false;
  }
  return true;
}

}  // namespace rotshock
