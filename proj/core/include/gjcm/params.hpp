#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gjcm {

using complex = std::complex<double>;

inline constexpr double kHbar = 1.0545718e-34;  // J s
inline constexpr double kPi = 3.14159265358979323846;

// Raw SI inputs. Frequencies in rad/s, masses in kg, times in s.
struct PhysicalInputs {
  double q = 1e7;          // wavenumber, 1/m
  double mass = 1e-26;     // atomic mass, kg
  double g_accel = 9.8;    // m/s^2
  double q_dot_g = 0.0;    // projection q.g, 1/s^2 (chirp rate of the detuning)
  double lambda = 1e6;     // atom-field coupling, rad/s
  double omega_c = 9e7;    // field frequency, rad/s
  double delta0 = 0.0;     // detuning at p = 0, t = 0, i.e. (3/2)(omega_c - omega_eg)
  double theta = 0.0;      // angle between q and p, rad
};

// Validated, immutable physical parameter set.
class PhysicalParams {
 public:
  explicit PhysicalParams(const PhysicalInputs& inputs = {});

  // Rebuilds q from a recoil frequency hbar q^2 / 2M.
  static PhysicalParams from_recoil(double omega_rec, const PhysicalInputs& rest);

  double q() const noexcept { return in_.q; }
  double mass() const noexcept { return in_.mass; }
  double g_accel() const noexcept { return in_.g_accel; }
  double q_dot_g() const noexcept { return in_.q_dot_g; }
  double lambda() const noexcept { return in_.lambda; }
  double omega_c() const noexcept { return in_.omega_c; }
  double delta0() const noexcept { return in_.delta0; }
  double omega_eg() const noexcept { return in_.omega_c - in_.delta0 / 1.5; }
  double theta() const noexcept { return in_.theta; }
  // Exactly zero when q is perpendicular to p (|cos| below 1e-12).
  double cos_theta() const noexcept { return cos_theta_; }
  double hbar() const noexcept { return kHbar; }
  double omega_rec() const noexcept { return omega_rec_; }

  const PhysicalInputs& inputs() const noexcept { return in_; }

  PhysicalParams with_q_dot_g(double q_dot_g) const;
  PhysicalParams with_delta0(double delta0) const;
  PhysicalParams with_lambda(double lambda) const;

 private:
  PhysicalInputs in_;
  double cos_theta_;
  double omega_rec_;
};

PhysicalParams default_params();

// Gaussian centre-of-mass packet sampled on a Gauss-Hermite rule.
//
// The state depends on momentum only through the Doppler shift q p cos(theta) / M,
// so the packet is parametrised by the spread of that shift. Node momenta are
// recovered as u M / (q cos theta); with cos theta = 0 the momentum scale falls
// back to M / q and every node sees zero Doppler shift.
//
// weights() integrate over the shift variable u and amplitudes() hold phi(u_i);
// the pair is renormalised so that sum_i w_i |phi_i|^2 = 1.
class WavePacketSpec {
 public:
  WavePacketSpec(double doppler_sigma, int node_count, const PhysicalParams& params);

  double doppler_sigma() const noexcept { return doppler_sigma_; }
  int node_count() const noexcept { return static_cast<int>(momenta_.size()); }

  std::span<const double> momenta() const noexcept { return momenta_; }
  std::span<const double> doppler_shifts() const noexcept { return shifts_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }

  // w_i |phi_i|^2, sums to one.
  double probability(int i) const noexcept {
    return weights_[i] * amplitudes_[i] * amplitudes_[i];
  }

 private:
  double doppler_sigma_;
  std::vector<double> momenta_;
  std::vector<double> shifts_;
  std::vector<double> weights_;
  std::vector<double> amplitudes_;
};

// Gauss-Hermite rule for the weight exp(-x^2) (Golub-Welsch).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int node_count);

struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  double y_min = -8.0;
  double y_max = 8.0;
  int nx = 81;
  int ny = 81;

  std::vector<double> xs() const;
  std::vector<double> ys() const;
};

struct SimulationConfig {
  int n_max = 70;
  complex alpha{5.0, 0.0};
  complex c_e{0.70710678118654752, 0.0};
  complex c_g{0.70710678118654752, 0.0};
  GridSpec wigner;
  // Below this |q.g| (1/s^2) the phase integral is done by quadrature.
  double branch_threshold = 1.0;

  void validate() const;
};

// Tolerances enforced by SimulationConfig::validate().
inline constexpr double kAtomicNormTolerance = 1e-12;
inline constexpr double kPoissonTailTolerance = 1e-12;

// P(N > n_max) for a Poisson variable with the given mean.
double poisson_tail(double mean, int n_max);

// 7 pi / (2 lambda).
double half_revival_time(const PhysicalParams& params);

struct RunConfig {
  PhysicalParams physical;
  WavePacketSpec packet;
  SimulationConfig sim;
  std::map<std::string, std::string> units;
};

RunConfig default_run_config();

// Flat JSON object; missing keys take defaults. Throws ParseError or ValidationError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical JSON with every key present; parse_config(to_json(c)) reproduces c.
std::string to_json(const RunConfig& config);

// FNV-1a of to_json(config).
std::uint64_t config_hash(const RunConfig& config);
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Path named by GRAVITY_JCM_CONFIG, if set and non-empty.
std::optional<std::filesystem::path> config_path_from_env();

}  // namespace gjcm
