#pragma once

namespace rotshock {

struct GasModel {
  double gamma = 1.4;
  double beta = 0.0;

  void validate() const;
};

struct GasState {
  double rho = 1.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double P = 1.0;
};

struct CharState {
  double u1 = 0.0;
  double u2 = 0.0;
  double S = 0.0;
  double B = 0.0;
};

struct MachInfo {
  double c = 0.0;
  double M = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
};

CharState to_char(const GasState& s, const GasModel& m);
GasState from_char(const CharState& c, const GasModel& m);
MachInfo mach_and_sound(const GasState& s, const GasModel& m);

// rho(S, B, |u|^2) and P(S, B, |u|^2); both throw on vacuum.
double density(double S, double B, double q2, const GasModel& m);
double pressure(double S, double B, double q2, const GasModel& m);
// c^2 = gamma e^S rho^(gamma-1)
double sound_speed_sq(double rho, double S, const GasModel& m);

}  // namespace rotshock
