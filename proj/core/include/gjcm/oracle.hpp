#pragma once

#include <Eigen/Dense>

#include "gjcm/evolution.hpp"
#include "gjcm/params.hpp"

namespace gjcm {

// Brute-force check of the closed-form dynamics: every block {|e,n>, |g,n+1>}
// at every momentum node is integrated with classical RK4 under
//   i d/dt (a, b) = [[omega_c (n+1) - Delta(t), 2 lambda sqrt(n+1)],
//                    [2 lambda sqrt(n+1),       omega_c (n+1) + Delta(t)]] (a, b).
// The omega_c (n+1) identity part is removed exactly as a global block phase,
// so the step only has to resolve Omega_n.

enum class BlockConvention {
  kDoubledGap,      // eigenvalues omega_c (n+1) +/- Omega_n (default)
  kLiteralHalfGap,  // traceless part halved: +/- Omega_n / 2
};

inline constexpr int kMinStepsPerPeriod = 40;

struct StepPolicy {
  int steps_per_period = 2048;  // per shortest period 2 pi / max Omega_n
  BlockConvention convention = BlockConvention::kDoubledGap;
};

struct BlockRun {
  Eigen::Vector2cd amplitudes;
  long steps = 0;
  double norm_drift = 0.0;  // relative |  |x(t)|^2 - |x(t0)|^2 |
};

// Integrates one block from t0 to t. Throws ResolutionError when the policy
// asks for fewer than kMinStepsPerPeriod steps per period.
BlockRun integrate_block(const PhysicalParams& params, double p, int n,
                         const Eigen::Vector2cd& initial, double t, const StepPolicy& policy = {},
                         double t0 = 0.0);

struct OdeRunReport {
  EvolvedState state;
  long step_count = 0;
  double max_norm_drift = 0.0;
  double fidelity = 1.0;  // against the closed form, when compared
};

// Oracle evolution of the whole state from t = 0 to t.
OdeRunReport integrate_state(const InitialState& initial, const PhysicalParams& params, double t,
                             const StepPolicy& policy = {}, int threads = 1);

// |<a|b>|^2 / (<a|a> <b|b>) with the momentum-node weights.
double state_fidelity(const EvolvedState& a, const EvolvedState& b);

// Full report: oracle run plus fidelity against evolve() for the same inputs.
OdeRunReport compare_with_closed_form(const RunConfig& config, const PhysicalParams& params,
                                      double t, const StepPolicy& policy = {}, int threads = 1);

double fidelity_vs_closed_form(const RunConfig& config, const PhysicalParams& params, double t,
                               const StepPolicy& policy = {}, int threads = 1);

}  // namespace gjcm
