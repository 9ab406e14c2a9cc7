#include "doctest.h"

#include <gjcm/dressed.hpp>
#include <gjcm/errors.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace gjcm;

namespace {

PhysicalParams with_delta(double delta0) { return default_params().with_delta0(delta0); }

// Step near the balance between truncation (~d^2) and rounding (~eps/d^2)
// for the relative Doppler excursion d = q h cos(theta) / (M Omega).
double balanced_step(const PhysicalParams& params, int n) {
  const DressedFrame f = dressed_frame(params, 0.0, 0.0, n);
  const double coupling = 2.0 * params.lambda() * std::sqrt(n + 1.0);
  const double share = (coupling / f.rabi) * (coupling / f.rabi);
  const double ratio = (params.omega_c() * (n + 1.0) + f.rabi) / f.rabi;
  const double d = std::pow(16.0 * 2.2e-16 * ratio / share, 0.25);
  return d * f.rabi * params.mass() / (params.q() * params.cos_theta());
}

}  // namespace

TEST_CASE("detuning is a linear chirp") {
  CHECK(detuning(default_params(), 0.0, 0.0) == 0.0);
  const PhysicalParams p = default_params().with_delta0(1.5e7).with_q_dot_g(1e7);
  CHECK(detuning(p, 0.0, 1.0) == doctest::Approx(0.5e7).epsilon(1e-15));
  CHECK(detuning(default_params().with_q_dot_g(1e7), 0.0, 1e-6) == doctest::Approx(-10.0).epsilon(1e-12));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> time(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double t = time(rng);
    CHECK(detuning(p, 0.0, t) - detuning(p, 0.0, 0.0) == doctest::Approx(-1e7 * t).epsilon(1e-12));
  }
  // Doppler term: a momentum that shifts by 1e6 rad/s.
  const double p1 = 1e6 * p.mass() / p.q();
  CHECK(detuning(p, p1, 0.0) == doctest::Approx(1.4e7).epsilon(1e-14));
  CHECK(detuning_from_shift(p, 1e6, 0.0) == doctest::Approx(1.4e7).epsilon(1e-15));
}

TEST_CASE("Rabi frequency") {
  CHECK(rabi_frequency(0.0, 1e6, 0) == doctest::Approx(2e6).epsilon(1e-15));
  CHECK(rabi_frequency(0.0, 1e6, 3) == doctest::Approx(4e6).epsilon(1e-15));
  CHECK(rabi_frequency(3e6, 1e6, 0) == doctest::Approx(std::sqrt(13.0) * 1e6).epsilon(1e-15));
  CHECK(rabi_frequency(default_params(), 0.0, 0.0, 0) == doctest::Approx(2e6));
}

TEST_CASE("mixing angles") {
  const MixingAngles a = mixing_angles(0.0, 1e6, 0);
  CHECK(a.sin_theta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(a.cos_theta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  const MixingAngles b = mixing_angles(3e6, 1e6, 0);
  CHECK(b.sin_theta == doctest::Approx(0.9571).epsilon(1e-4));
  CHECK(b.cos_theta == doctest::Approx(0.2898).epsilon(1e-3));

  const MixingAngles far = mixing_angles(1e12, 1e6, 0);
  CHECK(far.sin_theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(far.cos_theta < 1e-5);

  // Far negative detuning stays accurate (no Delta + Omega cancellation).
  const MixingAngles neg = mixing_angles(-1e12, 1e6, 0);
  CHECK(neg.sin_theta == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(neg.cos_theta == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(mixing_angles(-1.0, 0.0, 0), DegeneracyError);
  CHECK_NOTHROW(mixing_angles(1.0, 0.0, 0));
}

TEST_CASE("spectral properties over random draws") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ratio(-10.0, 10.0);
  std::uniform_int_distribution<int> block(0, 50);
  const double lambda = 1e6;
  for (int k = 0; k < 1000; ++k) {
    const double delta = ratio(rng) * lambda;
    const int n = block(rng);
    const double omega = rabi_frequency(delta, lambda, n);
    const double c = 2.0 * lambda * std::sqrt(n + 1.0);
    const MixingAngles m = mixing_angles(delta, lambda, n);
    REQUIRE(std::abs(m.sin_theta * m.sin_theta + m.cos_theta * m.cos_theta - 1.0) < 1e-12);
    REQUIRE(std::abs(omega * omega / (delta * delta + c * c) - 1.0) < 1e-12);
    REQUIRE(omega >= std::abs(delta));
    REQUIRE(omega >= c);
    // [[-D, c], [c, D]] (cos, sin) = Omega (cos, sin)
    Eigen::Matrix2d h;
    h << -delta, c, c, delta;
    const Eigen::Vector2d v(m.cos_theta, m.sin_theta);
    REQUIRE((h * v - omega * v).norm() / omega < 1e-9);
  }
}

TEST_CASE("eigenvector matches an independent eigen-solver") {
  const double delta = 2.7e6;
  const double c = 2.0 * 1e6 * std::sqrt(8.0);
  Eigen::Matrix2d h;
  h << -delta, c, c, delta;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(h);
  const Eigen::Vector2d top = solver.eigenvectors().col(1);
  const MixingAngles m = mixing_angles(delta, 1e6, 7);
  CHECK(solver.eigenvalues()(1) == doctest::Approx(rabi_frequency(delta, 1e6, 7)).epsilon(1e-14));
  CHECK(std::abs(std::abs(top.dot(Eigen::Vector2d(m.cos_theta, m.sin_theta))) - 1.0) < 1e-14);
}

TEST_CASE("energy eigenvalues") {
  const EnergyPair e = energy_eigenvalues(default_params(), 0.0, 0.0, 0);
  CHECK(e.plus / kHbar == doctest::Approx(9.2e7).epsilon(1e-14));
  CHECK(e.minus / kHbar == doctest::Approx(8.8e7).epsilon(1e-14));

  // Decoupled limit: degenerate at hbar omega_c (n+1).
  const PhysicalParams weak = default_params().with_lambda(1e-9);
  const EnergyPair d = energy_eigenvalues(weak, 0.0, 0.0, 4);
  CHECK(d.plus / kHbar == doctest::Approx(4.5e8).epsilon(1e-15));
  CHECK(d.minus / kHbar == doctest::Approx(4.5e8).epsilon(1e-15));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> shift(-2e7, 2e7);
  for (int k = 0; k < 50; ++k) {
    const PhysicalParams p = with_delta(shift(rng));
    const DressedFrame f = dressed_frame(p, 0.0, 0.0, k % 30);
    CHECK((f.e_plus - f.e_minus) / (2.0 * kHbar * f.rabi) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("effective mass: reference point") {
  const EffectiveMassResult r = effective_mass(default_params(), 0.0, 0.0, 0);
  CHECK(r.m_star == doctest::Approx(1.897e-26).epsilon(1e-3));
  CHECK(r.m_star == doctest::Approx(1.8965043442276766e-26).epsilon(1e-12));
  const double omega = 2e6;
  CHECK(r.m_star == doctest::Approx(std::pow(omega / r.eta, 3)).epsilon(1e-12));
}

TEST_CASE("effective mass: cubic law and monotonicity") {
  // Doubling Omega at fixed eta: Delta from 0 to 2 sqrt(3) lambda (n = 0).
  const double base = effective_mass(default_params(), 0.0, 0.0, 0).m_star;
  const double doubled = effective_mass(with_delta(2.0 * std::sqrt(3.0) * 1e6), 0.0, 0.0, 0).m_star;
  CHECK(doubled / base == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(effective_mass(with_delta(0.5e7), 0.0, 0.0, 0).m_star > base);
}

TEST_CASE("effective mass: singular geometry") {
  PhysicalInputs in;
  in.theta = kPi / 2;
  const PhysicalParams perp(in);
  CHECK_THROWS_AS(effective_mass(perp, 0.0, 0.0, 0), SingularGeometryError);
  // The energy does not depend on p at all.
  CHECK_THROWS_AS(effective_mass_fd(perp, 0.0, 0.0, 0, 1e-30), SingularGeometryError);
}

TEST_CASE("effective mass: finite-difference oracle over random draws") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ratio(-10.0, 10.0);
  std::uniform_int_distribution<int> block(0, 50);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PhysicalParams p = with_delta(ratio(rng) * 1e6);
    const int n = block(rng);
    const double closed = effective_mass(p, 0.0, 0.0, n).m_star;
    const double fd = effective_mass_fd(p, 0.0, 0.0, n, balanced_step(p, n));
    worst = std::max(worst, std::abs(fd / closed - 1.0));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("effective mass: finite difference is symmetric in the step") {
  const PhysicalParams p = with_delta(1.3e6);
  const double h = balanced_step(p, 3);
  CHECK(effective_mass_fd(p, 0.0, 0.0, 3, h) == effective_mass_fd(p, 0.0, 0.0, 3, -h));
  CHECK_THROWS_AS(effective_mass_fd(p, 0.0, 0.0, 3, 0.0), InvalidStepError);
}

TEST_CASE("effective mass: nearly linear energy reports a huge or singular mass") {
  const PhysicalParams p = with_delta(1e7).with_lambda(1e-3);
  const double reference = effective_mass(default_params(), 0.0, 0.0, 0).m_star;
  try {
    CHECK(effective_mass_fd(p, 0.0, 0.0, 0, 1e-30) > 1e6 * reference);
  } catch (const SingularGeometryError&) {
    CHECK(true);
  }
}
