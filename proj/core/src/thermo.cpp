#include "rotshock/thermo.hpp"

#include <cmath>
#include <sstream>

#include "rotshock/error.hpp"

namespace rotshock {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::Vacuum: return "vacuum";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Config: return "config";
    case ErrorKind::DegenerateBackground: return "degenerate-background";
    case ErrorKind::DegenerateSelection: return "degenerate-selection";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Incompatible: return "incompatible-data";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::TrustRegion: return "trust-region";
    case ErrorKind::Cfl: return "cfl";
    case ErrorKind::FlowReversal: return "flow-reversal";
    case ErrorKind::NotSupersonic: return "not-supersonic";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return 1;
    case ErrorKind::InvalidState:
    case ErrorKind::Vacuum:
    case ErrorKind::Precondition:
    case ErrorKind::DegenerateBackground:
    case ErrorKind::NotSupersonic: return 2;
    case ErrorKind::DegenerateSelection:
    case ErrorKind::OutOfRange:
    case ErrorKind::Incompatible: return 3;
    case ErrorKind::NonConvergence:
    case ErrorKind::TrustRegion:
    case ErrorKind::Cfl:
    case ErrorKind::FlowReversal: return 4;
  }
  return 4;
}

void GasModel::validate() const {
  if (!(gamma > 1.0)) {
    throw Error(ErrorKind::Precondition, "gamma must exceed 1", gamma);
  }
  if (!(beta >= 0.0)) {
    throw Error(ErrorKind::Precondition, "beta must be non-negative", beta);
  }
}

namespace {

// Guarded enthalpy-like quantity B - |u|^2/2.
double kinetic_gap(double B, double q2) {
  const double gap = B - 0.5 * q2;
  if (!(gap > 0.0) || gap < 1e-14 * std::abs(B)) {
    std::ostringstream os;
    os << "vacuum state: B - |u|^2/2 = " << gap;
    throw Error(ErrorKind::Vacuum, os.str(), gap);
  }
  return gap;
}

}  // namespace

double density(double S, double B, double q2, const GasModel& m) {
  const double g = m.gamma;
  const double base = std::log((g - 1.0) / g * kinetic_gap(B, q2)) - S;
  return std::exp(base / (g - 1.0));
}

double pressure(double S, double B, double q2, const GasModel& m) {
  const double g = m.gamma;
  const double base = std::log((g - 1.0) / g * kinetic_gap(B, q2)) - S / g;
  return std::exp(base * g / (g - 1.0));
}

double sound_speed_sq(double rho, double S, const GasModel& m) {
  return m.gamma * std::exp(S + (m.gamma - 1.0) * std::log(rho));
}

CharState to_char(const GasState& s, const GasModel& m) {
  if (!(s.rho > 0.0) || !(s.P > 0.0)) {
    throw Error(ErrorKind::InvalidState, "density and pressure must be positive",
                s.rho > 0.0 ? s.P : s.rho);
  }
  const double g = m.gamma;
  CharState c;
  c.u1 = s.u1;
  c.u2 = s.u2;
  c.S = std::log(s.P) - g * std::log(s.rho);
  c.B = 0.5 * (s.u1 * s.u1 + s.u2 * s.u2) + g * s.P / ((g - 1.0) * s.rho);
  return c;
}

GasState from_char(const CharState& c, const GasModel& m) {
  const double q2 = c.u1 * c.u1 + c.u2 * c.u2;
  GasState s;
  s.u1 = c.u1;
  s.u2 = c.u2;
  s.rho = density(c.S, c.B, q2, m);
  s.P = pressure(c.S, c.B, q2, m);
  return s;
}

MachInfo mach_and_sound(const GasState& s, const GasModel& m) {
  if (!(s.rho > 0.0) || !(s.P > 0.0)) {
    throw Error(ErrorKind::InvalidState, "density and pressure must be positive",
                s.rho > 0.0 ? s.P : s.rho);
  }
  MachInfo r;
  r.c = std::sqrt(m.gamma * s.P / s.rho);
  r.M1 = s.u1 / r.c;
  r.M2 = s.u2 / r.c;
  r.M = std::hypot(s.u1, s.u2) / r.c;
  return r;
}

}  // namespace rotshock
