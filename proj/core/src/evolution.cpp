#include "gjcm/evolution.hpp"

#include <cmath>

#include "gjcm/dressed.hpp"
#include "gjcm/errors.hpp"
#include "gjcm/parallel.hpp"
#include "gjcm/quadrature.hpp"

namespace gjcm {

namespace {

constexpr double kPhaseQuadratureTolerance = 1e-13;

// Integral of sqrt(Delta(s)^2 + c^2) for s in [0, duration], where
// Delta(s) = d0 - qg s and d1 = Delta(duration).
//
// The antiderivative difference is regrouped so that neither term carries a
// 1/qg factor:
//   [d0 O0 - d1 O1] / (2 qg) = duration [d0 (d0 + d1) / (O0 + O1) + O1] / 2
//   c^2 ln(S0 / S1) / (2 qg) = c^2 duration k log1p(y) / (2 y),
// with S = Delta + Omega, k = (S0 + S1) / ((O0 + O1) S1) and y = qg duration k.
double closed_form_phase(double d0, double d1, double qg, double duration, double lambda, int n) {
  const double c2 = 4.0 * lambda * lambda * (n + 1.0);
  const double o0 = rabi_frequency(d0, lambda, n);
  const double o1 = rabi_frequency(d1, lambda, n);
  const double s0 = detuning_plus_rabi(d0, lambda, n);
  const double s1 = detuning_plus_rabi(d1, lambda, n);
  if (!(s0 > 0.0) || !(s1 > 0.0)) throw DomainError("Delta + Omega must be positive (lambda = 0?)");
  const double algebraic = 0.5 * duration * (d0 * (d0 + d1) / (o0 + o1) + o1);
  const double k = (s0 + s1) / ((o0 + o1) * s1);
  const double y = qg * duration * k;
  const double log_ratio = y == 0.0 ? 1.0 : std::log1p(y) / y;
  return algebraic + 0.5 * c2 * duration * k * log_ratio;
}

double quadrature_phase(double d0, double qg, double duration, double lambda, int n) {
  if (duration == 0.0) return 0.0;
  const double c = 2.0 * lambda * std::sqrt(n + 1.0);
  if (c == 0.0 && d0 - qg * duration <= 0.0 && d0 <= 0.0)
    throw DomainError("Delta + Omega must be positive (lambda = 0?)");
  auto omega = [=](double s) { return std::hypot(d0 - qg * s, c); };
  return quadrature(omega, 0.0, duration, kPhaseQuadratureTolerance).value;
}

bool use_closed_form(double qg, double branch_threshold) {
  return qg != 0.0 && std::abs(qg) >= branch_threshold;
}

double interval_phase(const PhysicalParams& params, double p, int n, double t0, double t1,
                      double branch_threshold) {
  if (t1 < t0) throw DomainError("phase integral needs t >= t0");
  const double duration = t1 - t0;
  if (duration == 0.0) return 0.0;
  const double d0 = detuning(params, p, t0);
  const double qg = params.q_dot_g();
  if (use_closed_form(qg, branch_threshold)) {
    return closed_form_phase(d0, detuning(params, p, t1), qg, duration, params.lambda(), n);
  }
  return quadrature_phase(d0, qg, duration, params.lambda(), n);
}

// Antiderivative Lambda(t) of Omega_n, literal endpoint form.
double endpoint_antiderivative(const PhysicalParams& params, double p, int n, double t) {
  const double d = detuning(params, p, t);
  const double o = rabi_frequency(d, params.lambda(), n);
  const double s = d + o;
  if (!(s > 0.0)) throw DomainError("Delta + Omega must be positive");
  const double half_c2 = 2.0 * params.lambda() * params.lambda() * (n + 1.0);
  return -(d * o / 2.0 + half_c2 * std::log(s)) / params.q_dot_g();
}

}  // namespace

double EvolvedState::norm() const {
  double total = 0.0;
  for (int i = 0; i < node_count(); ++i) {
    total += weights[i] * (psi1.col(i).squaredNorm() + psi2.col(i).squaredNorm());
  }
  return total;
}

InitialState build_initial(const SimulationConfig& config, const WavePacketSpec& packet) {
  config.validate();
  const int n_max = config.n_max;
  Eigen::VectorXcd fock(n_max + 1);
  const double modulus = std::abs(config.alpha);
  if (modulus == 0.0) {
    fock.setZero();
    fock(0) = 1.0;
  } else {
    const double arg = std::arg(config.alpha);
    const double log_mod = std::log(modulus);
    for (int n = 0; n <= n_max; ++n) {
      const double log_mag = -0.5 * modulus * modulus + n * log_mod - 0.5 * std::lgamma(n + 1.0);
      fock(n) = std::polar(std::exp(log_mag), n * arg);
    }
  }
  return InitialState{std::move(fock), config.c_e, config.c_g, packet};
}

EvolvedState initial_amplitudes(const InitialState& initial) {
  const int rows = initial.n_max() + 1;
  const int nodes = initial.packet.node_count();
  EvolvedState state;
  state.psi1.resize(rows, nodes);
  state.psi2.resize(rows, nodes);
  for (int i = 0; i < nodes; ++i) {
    const double phi = initial.packet.amplitudes()[i];
    state.psi1.col(i) = initial.fock * (initial.c_e * phi);
    state.psi2.col(i) = initial.fock * (initial.c_g * phi);
  }
  const auto w = initial.packet.weights();
  const auto p = initial.packet.momenta();
  state.weights.assign(w.begin(), w.end());
  state.momenta.assign(p.begin(), p.end());
  state.time = 0.0;
  return state;
}

DressedAmplitudes to_dressed(const EvolvedState& state, const PhysicalParams& params,
                             double branch_threshold) {
  const int blocks = state.n_max();
  const int nodes = state.node_count();
  DressedAmplitudes out;
  out.phi1.resize(blocks, nodes);
  out.phi2.resize(blocks, nodes);
  out.reference_phase.resize(blocks, nodes);
  out.ground_vacuum = state.psi2.row(0).transpose();
  out.top_excited = state.psi1.row(blocks).transpose();
  out.weights = state.weights;
  out.momenta = state.momenta;
  out.time = state.time;
  for (int i = 0; i < nodes; ++i) {
    const double p = state.momenta[i];
    for (int n = 0; n < blocks; ++n) {
      const MixingAngles a = mixing_angles(params, p, state.time, n);
      const complex e = state.psi1(n, i);
      const complex g = state.psi2(n + 1, i);
      out.phi1(n, i) = a.cos_theta * e + a.sin_theta * g;
      out.phi2(n, i) = a.sin_theta * e - a.cos_theta * g;
      out.reference_phase(n, i) = reference_phase(params, p, n, state.time, branch_threshold);
    }
  }
  return out;
}

EvolvedState from_dressed(const DressedAmplitudes& amps, const PhysicalParams& params, double t) {
  const int blocks = static_cast<int>(amps.phi1.rows());
  const int nodes = static_cast<int>(amps.phi1.cols());
  EvolvedState state;
  state.psi1.resize(blocks + 1, nodes);
  state.psi2.resize(blocks + 1, nodes);
  state.psi2.row(0) = amps.ground_vacuum.transpose();
  state.psi1.row(blocks) = amps.top_excited.transpose();
  state.weights = amps.weights;
  state.momenta = amps.momenta;
  state.time = t;
  for (int i = 0; i < nodes; ++i) {
    const double p = amps.momenta[i];
    for (int n = 0; n < blocks; ++n) {
      const MixingAngles a = mixing_angles(params, p, t, n);
      const complex plus = amps.phi1(n, i);
      const complex minus = amps.phi2(n, i);
      state.psi1(n, i) = a.cos_theta * plus + a.sin_theta * minus;
      state.psi2(n + 1, i) = a.sin_theta * plus - a.cos_theta * minus;
    }
  }
  return state;
}

double phase_integral(const PhysicalParams& params, double p, int n, double t,
                      double branch_threshold) {
  if (t < 0.0) throw DomainError("phase integral needs t >= 0");
  return interval_phase(params, p, n, 0.0, t, branch_threshold);
}

double phase_integral_closed_form(const PhysicalParams& params, double p, int n, double t) {
  if (t < 0.0) throw DomainError("phase integral needs t >= 0");
  if (params.q_dot_g() == 0.0) throw DomainError("closed-form phase needs q.g != 0");
  return closed_form_phase(detuning(params, p, 0.0), detuning(params, p, t), params.q_dot_g(), t,
                           params.lambda(), n);
}

double phase_integral_endpoint_form(const PhysicalParams& params, double p, int n, double t) {
  if (params.q_dot_g() == 0.0) throw DomainError("closed-form phase needs q.g != 0");
  return endpoint_antiderivative(params, p, n, t) - endpoint_antiderivative(params, p, n, 0.0);
}

double phase_integral_quadrature(const PhysicalParams& params, double p, int n, double t) {
  if (t < 0.0) throw DomainError("phase integral needs t >= 0");
  return quadrature_phase(detuning(params, p, 0.0), params.q_dot_g(), t, params.lambda(), n);
}

complex reference_phase(const PhysicalParams& params, double p, int n, double t,
                        double branch_threshold) {
  if (!use_closed_form(params.q_dot_g(), branch_threshold)) return {1.0, 0.0};
  return std::polar(1.0, endpoint_antiderivative(params, p, n, t));
}

EvolvedState evolve(const InitialState& initial, const PhysicalParams& params, double t,
                    double branch_threshold, int threads) {
  if (t < 0.0) throw DomainError("evolve needs t >= 0");
  return evolve_from(initial_amplitudes(initial), params, t, branch_threshold, threads);
}

EvolvedState evolve_from(const EvolvedState& state, const PhysicalParams& params, double t_end,
                         double branch_threshold, int threads) {
  const double t0 = state.time;
  if (t_end < t0) throw DomainError("evolve_from cannot run backwards");
  const double duration = t_end - t0;
  const int blocks = state.n_max();

  EvolvedState out = state;
  out.time = t_end;
  // Columns are independent; each worker owns its own column.
  parallel_for(state.node_count(), threads, [&](int i) {
    const double p = state.momenta[i];
    for (int n = 0; n < blocks; ++n) {
      const MixingAngles before = mixing_angles(params, p, t0, n);
      const complex e = state.psi1(n, i);
      const complex g = state.psi2(n + 1, i);
      complex plus = before.cos_theta * e + before.sin_theta * g;
      complex minus = before.sin_theta * e - before.cos_theta * g;

      const double phase = interval_phase(params, p, n, t0, t_end, branch_threshold);
      const complex free = std::polar(1.0, -params.omega_c() * (n + 1.0) * duration);
      plus *= free * std::polar(1.0, -phase);
      minus *= free * std::polar(1.0, phase);

      const MixingAngles after = mixing_angles(params, p, t_end, n);
      out.psi1(n, i) = after.cos_theta * plus + after.sin_theta * minus;
      out.psi2(n + 1, i) = after.sin_theta * plus - after.cos_theta * minus;
    }
  });
  return out;
}

double atomic_inversion(const EvolvedState& state) {
  double total = 0.0;
  for (int i = 0; i < state.node_count(); ++i) {
    total += state.weights[i] * (state.psi1.col(i).squaredNorm() - state.psi2.col(i).squaredNorm());
  }
  return total;
}

}  // namespace gjcm
