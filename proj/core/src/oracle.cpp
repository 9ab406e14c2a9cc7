#include "gjcm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "gjcm/dressed.hpp"
#include "gjcm/errors.hpp"
#include "gjcm/parallel.hpp"

namespace gjcm {

namespace {

struct Pair {
  complex a;
  complex b;
};

// -i H x for H = scale * [[-delta, c], [c, delta]]
inline Pair rhs(const Pair& x, double delta, double c) {
  const complex ha = -delta * x.a + c * x.b;
  const complex hb = c * x.a + delta * x.b;
  return {complex(ha.imag(), -ha.real()), complex(hb.imag(), -hb.real())};
}

}  // namespace

BlockRun integrate_block(const PhysicalParams& params, double p, int n,
                         const Eigen::Vector2cd& initial, double t, const StepPolicy& policy,
                         double t0) {
  if (policy.steps_per_period < kMinStepsPerPeriod)
    throw ResolutionError("step policy must resolve at least 40 steps per period");
  if (t < t0) throw DomainError("integrate_block needs t >= t0");

  const double scale = policy.convention == BlockConvention::kDoubledGap ? 1.0 : 0.5;
  const double c = scale * 2.0 * params.lambda() * std::sqrt(n + 1.0);
  const double d_start = detuning(params, p, t0);
  const double qg = params.q_dot_g();
  const double duration = t - t0;

  BlockRun run;
  Pair x{initial(0), initial(1)};
  const double norm0 = std::norm(x.a) + std::norm(x.b);
  if (duration > 0.0) {
    // Omega is convex in t, so its maximum sits at an endpoint.
    const double omega_max = scale * std::max(rabi_frequency(d_start, params.lambda(), n),
                                              rabi_frequency(detuning(params, p, t), params.lambda(), n));
    const double dt_target = 2.0 * kPi / (omega_max * policy.steps_per_period);
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt_target)));
    const double dt = duration / steps;
    for (long k = 0; k < steps; ++k) {
      const double s = k * dt;
      const double d0 = scale * (d_start - qg * s);
      const double dh = scale * (d_start - qg * (s + 0.5 * dt));
      const double d1 = scale * (d_start - qg * (s + dt));
      const Pair k1 = rhs(x, d0, c);
      const Pair k2 = rhs({x.a + 0.5 * dt * k1.a, x.b + 0.5 * dt * k1.b}, dh, c);
      const Pair k3 = rhs({x.a + 0.5 * dt * k2.a, x.b + 0.5 * dt * k2.b}, dh, c);
      const Pair k4 = rhs({x.a + dt * k3.a, x.b + dt * k3.b}, d1, c);
      x.a += dt / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
      x.b += dt / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    }
    run.steps = steps;
  }
  const double norm1 = std::norm(x.a) + std::norm(x.b);
  run.norm_drift = norm0 > 0.0 ? std::abs(norm1 - norm0) / norm0 : 0.0;
  const complex free = std::polar(1.0, -params.omega_c() * (n + 1.0) * duration);
  run.amplitudes << free * x.a, free * x.b;
  return run;
}

OdeRunReport integrate_state(const InitialState& initial, const PhysicalParams& params, double t,
                             const StepPolicy& policy, int threads) {
  const EvolvedState start = initial_amplitudes(initial);
  OdeRunReport report;
  report.state = start;
  report.state.time = t;
  const int blocks = start.n_max();
  const int nodes = start.node_count();
  std::vector<long> steps(nodes, 0);
  std::vector<double> drift(nodes, 0.0);
  parallel_for(nodes, threads, [&](int i) {
    const double p = start.momenta[i];
    for (int n = 0; n < blocks; ++n) {
      const Eigen::Vector2cd x0(start.psi1(n, i), start.psi2(n + 1, i));
      const BlockRun run = integrate_block(params, p, n, x0, t, policy);
      report.state.psi1(n, i) = run.amplitudes(0);
      report.state.psi2(n + 1, i) = run.amplitudes(1);
      steps[i] += run.steps;
      drift[i] = std::max(drift[i], run.norm_drift);
    }
  });
  for (int i = 0; i < nodes; ++i) {
    report.step_count += steps[i];
    report.max_norm_drift = std::max(report.max_norm_drift, drift[i]);
  }
  return report;
}

double state_fidelity(const EvolvedState& a, const EvolvedState& b) {
  complex overlap = 0.0;
  for (int i = 0; i < a.node_count(); ++i) {
    overlap += a.weights[i] * (a.psi1.col(i).dot(b.psi1.col(i)) + a.psi2.col(i).dot(b.psi2.col(i)));
  }
  return std::norm(overlap) / (a.norm() * b.norm());
}

OdeRunReport compare_with_closed_form(const RunConfig& config, const PhysicalParams& params,
                                      double t, const StepPolicy& policy, int threads) {
  const InitialState initial = build_initial(config.sim, config.packet);
  OdeRunReport report = integrate_state(initial, params, t, policy, threads);
  const EvolvedState closed = evolve(initial, params, t, config.sim.branch_threshold, threads);
  report.fidelity = state_fidelity(report.state, closed);
  return report;
}

double fidelity_vs_closed_form(const RunConfig& config, const PhysicalParams& params, double t,
                               const StepPolicy& policy, int threads) {
  return compare_with_closed_form(config, params, t, policy, threads).fidelity;
}

}  // namespace gjcm
