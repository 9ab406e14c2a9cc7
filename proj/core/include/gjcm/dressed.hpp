#pragma once

#include "gjcm/params.hpp"

namespace gjcm {

// Instantaneous dressed doublet of the n-photon block {|e,n>, |g,n+1>}.
//
// Energies follow E(+/-) = hbar omega_c (n+1) +/- hbar Omega_n, so the doublet
// gap is 2 hbar Omega_n. The same convention drives the evolution phases and the
// ODE oracle Hamiltonian.
struct DressedFrame {
  int n = 0;
  double detuning = 0.0;   // rad/s
  double rabi = 0.0;       // Omega_n, rad/s
  double sin_theta = 0.0;
  double cos_theta = 0.0;
  double e_plus = 0.0;     // J
  double e_minus = 0.0;    // J
};

struct MixingAngles {
  double sin_theta;
  double cos_theta;
};

struct EnergyPair {
  double plus;
  double minus;
};

struct EffectiveMassResult {
  double m_star;  // kg
  double eta;     // rad/s
  DressedFrame frame;
};

// Delta(p, t) = delta0 - q p cos(theta) / M - (q.g) t.
double detuning(const PhysicalParams& params, double p, double t);

// Same, with the Doppler shift q p cos(theta) / M supplied directly.
double detuning_from_shift(const PhysicalParams& params, double doppler_shift, double t);

// sqrt(Delta^2 + 4 lambda^2 (n+1)).
double rabi_frequency(double detuning, double lambda, int n);
double rabi_frequency(const PhysicalParams& params, double p, double t, int n);

// Delta + Omega_n without cancellation for negative detuning.
double detuning_plus_rabi(double detuning, double lambda, int n);

// Throws DegeneracyError when lambda = 0 and Delta <= 0.
MixingAngles mixing_angles(double detuning, double lambda, int n);
MixingAngles mixing_angles(const PhysicalParams& params, double p, double t, int n);

EnergyPair energy_eigenvalues(double hbar, double omega_c, double rabi, int n);
EnergyPair energy_eigenvalues(const PhysicalParams& params, double p, double t, int n);

DressedFrame dressed_frame(const PhysicalParams& params, double p, double t, int n);

// m* = (Omega_n / eta)^3 with eta^3 = 4 lambda^2 hbar (n+1) q^2 cos^2(theta) / M^2.
// Throws SingularGeometryError when cos(theta) = 0.
EffectiveMassResult effective_mass(const PhysicalParams& params, double p, double t, int n);

// |[E(p+h) - 2E(p) + E(p-h)] / h^2|^-1 on the upper branch. Test oracle for
// effective_mass. Throws InvalidStepError for h = 0 and SingularGeometryError
// when the second difference vanishes.
double effective_mass_fd(const PhysicalParams& params, double p, double t, int n, double h);

}  // namespace gjcm
