#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gjcm/params.hpp"

namespace gjcm {

// Product state at t = 0: Fock amplitudes, atomic amplitudes and the packet.
struct InitialState {
  Eigen::VectorXcd fock;  // w_n, n = 0..n_max
  complex c_e;
  complex c_g;
  WavePacketSpec packet;

  int n_max() const { return static_cast<int>(fock.size()) - 1; }
};

// Amplitude tables psi1(n, i) = <e, n, p_i|psi>, psi2(n, i) = <g, n, p_i|psi>.
// Rows are photon numbers 0..n_max, columns are momentum nodes; the node
// amplitudes carry phi(p_i) and integrate against `weights`.
struct EvolvedState {
  Eigen::MatrixXcd psi1;
  Eigen::MatrixXcd psi2;
  std::vector<double> weights;
  std::vector<double> momenta;
  double time = 0.0;

  int n_max() const { return static_cast<int>(psi1.rows()) - 1; }
  int node_count() const { return static_cast<int>(psi1.cols()); }
  double norm() const;
};

// Amplitudes in the instantaneous dressed basis of every coupled block
// n = 0..n_max-1 (rows), at the time of the state they were taken from:
//   phi1 = <+, n|psi>,  phi2 = <-, n|psi>.
// |g,0> sits outside every block and is carried as ground_vacuum; |e,n_max>
// loses its partner |g,n_max+1> to the cutoff and is carried as top_excited.
// reference_phase holds the A0 anchoring factors of the gravity branch.
struct DressedAmplitudes {
  Eigen::MatrixXcd phi1;
  Eigen::MatrixXcd phi2;
  Eigen::MatrixXcd reference_phase;
  Eigen::VectorXcd ground_vacuum;
  Eigen::VectorXcd top_excited;
  std::vector<double> weights;
  std::vector<double> momenta;
  double time = 0.0;
};

// Coherent preparation w_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!). Throws
// CutoffError when the Poisson tail beyond n_max exceeds tolerance.
InitialState build_initial(const SimulationConfig& config, const WavePacketSpec& packet);

// psi1 = w_n c_e phi(p_i), psi2 = w_n c_g phi(p_i) at t = 0.
EvolvedState initial_amplitudes(const InitialState& initial);

DressedAmplitudes to_dressed(const EvolvedState& state, const PhysicalParams& params,
                             double branch_threshold = 1.0);

// Inverse of to_dressed with the mixing angles evaluated at time t.
EvolvedState from_dressed(const DressedAmplitudes& amps, const PhysicalParams& params, double t);

// Integral of Omega_n(p, t') over [0, t]. Uses the closed-form antiderivative
// for |q.g| >= branch_threshold and adaptive quadrature otherwise.
double phase_integral(const PhysicalParams& params, double p, int n, double t,
                      double branch_threshold = 1.0);

// Closed-form branch only. Requires q.g != 0. Evaluated in a rearranged form
// free of the 1/(q.g) cancellation between the two endpoint terms.
double phase_integral_closed_form(const PhysicalParams& params, double p, int n, double t);

// Closed form exactly as the endpoint antiderivative difference
// Lambda(t) - Lambda(0), Lambda = -[Delta Omega / 2 + 2 lambda^2 (n+1) ln(Delta + Omega)] / (q.g).
// Kept for conditioning diagnostics; loses digits as q.g -> 0.
double phase_integral_endpoint_form(const PhysicalParams& params, double p, int n, double t);

// Quadrature branch only.
double phase_integral_quadrature(const PhysicalParams& params, double p, int n, double t);

// A0 = exp(-i [Delta Omega / (2 q.g) + 2 lambda^2 (n+1) ln(Delta + Omega) / (q.g)]) at time t.
// Unity on the quadrature branch, where the phase is anchored at zero instead.
complex reference_phase(const PhysicalParams& params, double p, int n, double t,
                        double branch_threshold = 1.0);

// Closed-form evolution from t = 0 to t.
EvolvedState evolve(const InitialState& initial, const PhysicalParams& params, double t,
                    double branch_threshold = 1.0, int threads = 1);

// Continue from state.time to t_end. The detuning keeps chirping, so the
// phases are re-anchored at state.time rather than at zero.
EvolvedState evolve_from(const EvolvedState& state, const PhysicalParams& params, double t_end,
                         double branch_threshold = 1.0, int threads = 1);

// sum_i w_i sum_n (|psi1|^2 - |psi2|^2)
double atomic_inversion(const EvolvedState& state);

}  // namespace gjcm
