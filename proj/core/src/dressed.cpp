#include "gjcm/dressed.hpp"

#include <cmath>
#include <limits>

#include "gjcm/errors.hpp"

namespace gjcm {

namespace {

double coupling(double lambda, int n) { return 2.0 * lambda * std::sqrt(n + 1.0); }

void require_block(int n) {
  if (n < 0) throw DomainError("photon block index must be >= 0");
}

}  // namespace

double detuning(const PhysicalParams& params, double p, double t) {
  return detuning_from_shift(params, params.q() * p * params.cos_theta() / params.mass(), t);
}

double detuning_from_shift(const PhysicalParams& params, double doppler_shift, double t) {
  return params.delta0() - doppler_shift - params.q_dot_g() * t;
}

double rabi_frequency(double detuning, double lambda, int n) {
  require_block(n);
  return std::hypot(detuning, coupling(lambda, n));
}

double rabi_frequency(const PhysicalParams& params, double p, double t, int n) {
  return rabi_frequency(detuning(params, p, t), params.lambda(), n);
}

double detuning_plus_rabi(double detuning, double lambda, int n) {
  const double c = coupling(lambda, n);
  const double rabi = std::hypot(detuning, c);
  if (detuning >= 0.0) return detuning + rabi;
  // Omega^2 - Delta^2 = c^2.
  return c * c / (rabi - detuning);
}

MixingAngles mixing_angles(double detuning, double lambda, int n) {
  require_block(n);
  const double c = coupling(lambda, n);
  const double s = detuning_plus_rabi(detuning, lambda, n);
  const double norm = std::hypot(s, c);
  if (!(norm > 0.0)) throw DegeneracyError("mixing angles undefined: no coupling and Delta <= 0");
  return {s / norm, c / norm};
}

MixingAngles mixing_angles(const PhysicalParams& params, double p, double t, int n) {
  return mixing_angles(detuning(params, p, t), params.lambda(), n);
}

EnergyPair energy_eigenvalues(double hbar, double omega_c, double rabi, int n) {
  require_block(n);
  const double centre = hbar * omega_c * (n + 1.0);
  return {centre + hbar * rabi, centre - hbar * rabi};
}

EnergyPair energy_eigenvalues(const PhysicalParams& params, double p, double t, int n) {
  return energy_eigenvalues(params.hbar(), params.omega_c(), rabi_frequency(params, p, t, n), n);
}

DressedFrame dressed_frame(const PhysicalParams& params, double p, double t, int n) {
  DressedFrame f;
  f.n = n;
  f.detuning = detuning(params, p, t);
  f.rabi = rabi_frequency(f.detuning, params.lambda(), n);
  const MixingAngles a = mixing_angles(f.detuning, params.lambda(), n);
  f.sin_theta = a.sin_theta;
  f.cos_theta = a.cos_theta;
  const EnergyPair e = energy_eigenvalues(params.hbar(), params.omega_c(), f.rabi, n);
  f.e_plus = e.plus;
  f.e_minus = e.minus;
  return f;
}

EffectiveMassResult effective_mass(const PhysicalParams& params, double p, double t, int n) {
  if (params.cos_theta() == 0.0)
    throw SingularGeometryError("effective mass diverges: q is perpendicular to p");
  const DressedFrame frame = dressed_frame(params, p, t, n);
  const double ql = params.q() * params.cos_theta() / params.mass();
  const double eta3 =
      4.0 * params.lambda() * params.lambda() * params.hbar() * (n + 1.0) * ql * ql;
  const double ratio = frame.rabi / std::cbrt(eta3);
  return {ratio * ratio * ratio, std::cbrt(eta3), frame};
}

double effective_mass_fd(const PhysicalParams& params, double p, double t, int n, double h) {
  if (h == 0.0 || !std::isfinite(h)) throw InvalidStepError("finite-difference step must be nonzero");
  const double e_lo = energy_eigenvalues(params, p - h, t, n).plus;
  const double e_mid = energy_eigenvalues(params, p, t, n).plus;
  const double e_hi = energy_eigenvalues(params, p + h, t, n).plus;
  const double curvature = ((e_hi + e_lo) - 2.0 * e_mid) / (h * h);
  if (curvature == 0.0 || !std::isfinite(curvature))
    throw SingularGeometryError("energy has no curvature in p; effective mass diverges");
  return 1.0 / std::abs(curvature);
}

}  // namespace gjcm
