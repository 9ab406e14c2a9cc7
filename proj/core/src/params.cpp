#include "gjcm/params.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gjcm/errors.hpp"
#include "json.hpp"

namespace gjcm {

namespace {

void require_finite(const char* field, double v) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

void require_positive(const char* field, double v) {
  require_finite(field, v);
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0");
}

}  // namespace

PhysicalParams::PhysicalParams(const PhysicalInputs& inputs) : in_(inputs) {
  require_positive("q", in_.q);
  require_positive("M", in_.mass);
  require_positive("lambda", in_.lambda);
  require_positive("omega_c", in_.omega_c);
  require_finite("g", in_.g_accel);
  require_finite("qg", in_.q_dot_g);
  require_finite("delta0", in_.delta0);
  require_finite("theta", in_.theta);
  if (in_.g_accel < 0.0) throw ValidationError("g", "must be >= 0");
  // A projection cannot exceed the product of the magnitudes.
  if (in_.g_accel > 0.0 && std::abs(in_.q_dot_g) > in_.q * in_.g_accel * (1.0 + 1e-12)) {
    throw ValidationError("qg", "|q.g| exceeds q * g");
  }
  cos_theta_ = std::cos(in_.theta);
  if (std::abs(cos_theta_) < 1e-12) cos_theta_ = 0.0;
  omega_rec_ = kHbar * in_.q * in_.q / (2.0 * in_.mass);
}

PhysicalParams PhysicalParams::from_recoil(double omega_rec, const PhysicalInputs& rest) {
  require_positive("omega_rec", omega_rec);
  PhysicalInputs in = rest;
  in.q = std::sqrt(2.0 * rest.mass * omega_rec / kHbar);
  return PhysicalParams(in);
}

PhysicalParams PhysicalParams::with_q_dot_g(double q_dot_g) const {
  PhysicalInputs in = in_;
  in.q_dot_g = q_dot_g;
  return PhysicalParams(in);
}

PhysicalParams PhysicalParams::with_delta0(double delta0) const {
  PhysicalInputs in = in_;
  in.delta0 = delta0;
  return PhysicalParams(in);
}

PhysicalParams PhysicalParams::with_lambda(double lambda) const {
  PhysicalInputs in = in_;
  in.lambda = lambda;
  return PhysicalParams(in);
}

PhysicalParams default_params() { return PhysicalParams(PhysicalInputs{}); }

GaussHermiteRule gauss_hermite(int node_count) {
  if (node_count < 1) throw ValidationError("momentum_nodes", "must be >= 1");
  // Jacobi matrix of the physicists' Hermite polynomials.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(node_count, node_count);
  for (int k = 1; k < node_count; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(node_count);
  rule.weights.resize(node_count);
  const double mu0 = std::sqrt(kPi);
  for (int k = 0; k < node_count; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v * v;
  }
  // Exact symmetry; the eigensolver leaves ~1e-16 residue on the middle node.
  if (node_count % 2 == 1) rule.nodes[node_count / 2] = 0.0;
  return rule;
}

WavePacketSpec::WavePacketSpec(double doppler_sigma, int node_count,
                               const PhysicalParams& params)
    : doppler_sigma_(doppler_sigma) {
  require_finite("doppler_sigma", doppler_sigma);
  if (doppler_sigma < 0.0) throw ValidationError("doppler_sigma", "must be >= 0");
  if (node_count < 1) throw ValidationError("momentum_nodes", "must be >= 1");

  const double cos_t = params.cos_theta();
  const double momentum_per_shift =
      params.mass() / (params.q() * (cos_t != 0.0 ? cos_t : 1.0));

  if (doppler_sigma == 0.0) node_count = 1;
  const GaussHermiteRule rule = gauss_hermite(node_count);

  momenta_.resize(node_count);
  shifts_.resize(node_count);
  weights_.resize(node_count);
  amplitudes_.resize(node_count);
  double total = 0.0;
  for (int i = 0; i < node_count; ++i) {
    if (doppler_sigma == 0.0) {
      shifts_[i] = 0.0;
      weights_[i] = 1.0;
      amplitudes_[i] = 1.0;
    } else {
      // |phi(u)|^2 is a normal density of width sigma; u = sqrt(2) sigma x.
      const double x = rule.nodes[i];
      const double u = std::sqrt(2.0) * doppler_sigma * x;
      shifts_[i] = u;
      weights_[i] = rule.weights[i] * std::exp(x * x) * std::sqrt(2.0) * doppler_sigma;
      amplitudes_[i] = std::pow(2.0 * kPi * doppler_sigma * doppler_sigma, -0.25) *
                       std::exp(-u * u / (4.0 * doppler_sigma * doppler_sigma));
    }
    momenta_[i] = cos_t != 0.0 ? shifts_[i] * momentum_per_shift : 0.0;
    if (cos_t == 0.0) shifts_[i] = 0.0;
    total += weights_[i] * amplitudes_[i] * amplitudes_[i];
  }
  const double scale = 1.0 / std::sqrt(total);
  for (double& a : amplitudes_) a *= scale;
}

std::vector<double> GridSpec::xs() const {
  std::vector<double> v(nx);
  for (int i = 0; i < nx; ++i) v[i] = nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1);
  return v;
}

std::vector<double> GridSpec::ys() const {
  std::vector<double> v(ny);
  for (int i = 0; i < ny; ++i) v[i] = ny == 1 ? y_min : y_min + (y_max - y_min) * i / (ny - 1);
  return v;
}

double poisson_tail(double mean, int n_max) {
  if (mean < 0.0) throw ValidationError("alpha", "mean photon number must be >= 0");
  if (mean == 0.0) return 0.0;
  // Sum the tail directly so that values near 1e-15 keep full relative precision.
  double tail = 0.0;
  const double log_mean = std::log(mean);
  for (int n = n_max + 1;; ++n) {
    const double term = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && term < 1e-300 + 1e-18 * tail) break;
  }
  return tail;
}

void SimulationConfig::validate() const {
  if (n_max < 1) throw ValidationError("n_max", "must be >= 1");
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw ValidationError("alpha_re", "alpha must be finite");
  const double norm = std::norm(c_e) + std::norm(c_g);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kAtomicNormTolerance)
    throw ValidationError("ce_re", "|c_e|^2 + |c_g|^2 must equal 1 (got " +
                                       std::to_string(norm) + ")");
  const double tail = poisson_tail(std::norm(alpha), n_max);
  if (tail > kPoissonTailTolerance) {
    std::ostringstream msg;
    msg << "Poisson tail " << tail << " beyond n_max = " << n_max << " exceeds "
        << kPoissonTailTolerance;
    throw CutoffError(msg.str());
  }
  if (wigner.nx < 1) throw ValidationError("wigner_nx", "must be >= 1");
  if (wigner.ny < 1) throw ValidationError("wigner_ny", "must be >= 1");
  if (!(wigner.x_max > wigner.x_min)) throw ValidationError("wigner_xmax", "must exceed wigner_xmin");
  if (!(wigner.y_max > wigner.y_min)) throw ValidationError("wigner_ymax", "must exceed wigner_ymin");
  if (!(branch_threshold >= 0.0) || !std::isfinite(branch_threshold))
    throw ValidationError("branch_threshold", "must be finite and >= 0");
}

double half_revival_time(const PhysicalParams& params) {
  return 7.0 * kPi / (2.0 * params.lambda());
}

namespace {

const std::map<std::string, std::string>& unit_table() {
  static const std::map<std::string, std::string> units = {
      {"q", "1/m"},
      {"M", "kg"},
      {"g", "m/s^2"},
      {"qg", "1/s^2"},
      {"lambda", "rad/s"},
      {"omega_c", "rad/s"},
      {"delta0", "rad/s"},
      {"theta", "rad"},
      {"doppler_sigma", "rad/s"},
      {"sigma0_recoil", "photon recoil momenta (converted to doppler_sigma)"},
      {"momentum_nodes", "count"},
      {"alpha", "dimensionless (real shorthand for alpha_re)"},
      {"alpha_re", "dimensionless"},
      {"alpha_im", "dimensionless"},
      {"ce_re", "dimensionless"},
      {"ce_im", "dimensionless"},
      {"cg_re", "dimensionless"},
      {"cg_im", "dimensionless"},
      {"n_max", "count"},
      {"wigner_xmin", "dimensionless quadrature"},
      {"wigner_xmax", "dimensionless quadrature"},
      {"wigner_ymin", "dimensionless quadrature"},
      {"wigner_ymax", "dimensionless quadrature"},
      {"wigner_nx", "count"},
      {"wigner_ny", "count"},
      {"branch_threshold", "1/s^2"},
  };
  return units;
}

constexpr double kDefaultDopplerSigma = 1e6;
constexpr int kDefaultMomentumNodes = 21;

int line_of_offset(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

double get_real(const nlohmann::json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ValidationError(key, "expected a number");
  return it->get<double>();
}

int get_int(const nlohmann::json& obj, const char* key, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ValidationError(key, "expected an integer");
  return it->get<int>();
}

}  // namespace

RunConfig default_run_config() { return parse_config(""); }

RunConfig parse_config(std::string_view text) {
  nlohmann::json obj = nlohmann::json::object();
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (!blank) {
    try {
      obj = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
      const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
      throw ParseError("config parse error at line " + std::to_string(line) + ": " + e.what(),
                       line);
    }
    if (!obj.is_object()) throw ParseError("config root must be a JSON object", 1);
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!unit_table().count(key)) throw ValidationError(key, "unknown config key");
  }

  PhysicalInputs in;
  in.q = get_real(obj, "q", in.q);
  in.mass = get_real(obj, "M", in.mass);
  in.g_accel = get_real(obj, "g", in.g_accel);
  in.q_dot_g = get_real(obj, "qg", in.q_dot_g);
  in.lambda = get_real(obj, "lambda", in.lambda);
  in.omega_c = get_real(obj, "omega_c", in.omega_c);
  in.delta0 = get_real(obj, "delta0", in.delta0);
  in.theta = get_real(obj, "theta", in.theta);
  const PhysicalParams physical(in);

  if (obj.contains("doppler_sigma") && obj.contains("sigma0_recoil"))
    throw ValidationError("sigma0_recoil", "give either doppler_sigma or sigma0_recoil, not both");
  double doppler_sigma = get_real(obj, "doppler_sigma", kDefaultDopplerSigma);
  if (obj.contains("sigma0_recoil")) {
    // sigma0 photon momenta hbar q shift the transition by sigma0 * 2 omega_rec * cos(theta).
    const double sigma0 = get_real(obj, "sigma0_recoil", 1.0);
    if (!(sigma0 >= 0.0)) throw ValidationError("sigma0_recoil", "must be >= 0");
    doppler_sigma = sigma0 * 2.0 * physical.omega_rec() * std::abs(physical.cos_theta());
  }
  const int nodes = get_int(obj, "momentum_nodes", kDefaultMomentumNodes);
  WavePacketSpec packet(doppler_sigma, nodes, physical);

  SimulationConfig sim;
  sim.n_max = get_int(obj, "n_max", sim.n_max);
  sim.alpha = {get_real(obj, "alpha_re", get_real(obj, "alpha", sim.alpha.real())),
               get_real(obj, "alpha_im", sim.alpha.imag())};
  sim.c_e = {get_real(obj, "ce_re", sim.c_e.real()), get_real(obj, "ce_im", sim.c_e.imag())};
  sim.c_g = {get_real(obj, "cg_re", sim.c_g.real()), get_real(obj, "cg_im", sim.c_g.imag())};
  sim.wigner.x_min = get_real(obj, "wigner_xmin", sim.wigner.x_min);
  sim.wigner.x_max = get_real(obj, "wigner_xmax", sim.wigner.x_max);
  sim.wigner.y_min = get_real(obj, "wigner_ymin", sim.wigner.y_min);
  sim.wigner.y_max = get_real(obj, "wigner_ymax", sim.wigner.y_max);
  sim.wigner.nx = get_int(obj, "wigner_nx", sim.wigner.nx);
  sim.wigner.ny = get_int(obj, "wigner_ny", sim.wigner.ny);
  sim.branch_threshold = get_real(obj, "branch_threshold", sim.branch_threshold);
  sim.validate();

  return RunConfig{physical, std::move(packet), sim, unit_table()};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const RunConfig& config) {
  const PhysicalInputs& in = config.physical.inputs();
  const SimulationConfig& s = config.sim;
  // nlohmann::json keeps keys sorted, which makes the dump canonical.
  nlohmann::json obj = {
      {"q", in.q},
      {"M", in.mass},
      {"g", in.g_accel},
      {"qg", in.q_dot_g},
      {"lambda", in.lambda},
      {"omega_c", in.omega_c},
      {"delta0", in.delta0},
      {"theta", in.theta},
      {"doppler_sigma", config.packet.doppler_sigma()},
      {"momentum_nodes", config.packet.node_count()},
      {"alpha_re", s.alpha.real()},
      {"alpha_im", s.alpha.imag()},
      {"ce_re", s.c_e.real()},
      {"ce_im", s.c_e.imag()},
      {"cg_re", s.c_g.real()},
      {"cg_im", s.c_g.imag()},
      {"n_max", s.n_max},
      {"wigner_xmin", s.wigner.x_min},
      {"wigner_xmax", s.wigner.x_max},
      {"wigner_ymin", s.wigner.y_min},
      {"wigner_ymax", s.wigner.y_max},
      {"wigner_nx", s.wigner.nx},
      {"wigner_ny", s.wigner.ny},
      {"branch_threshold", s.branch_threshold},
  };
  return obj.dump(2);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& config) { return fnv1a(to_json(config)); }

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[i] = digits[value & 0xF];
  return out;
}

std::optional<std::filesystem::path> config_path_from_env() {
  const char* env = std::getenv("GRAVITY_JCM_CONFIG");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

}  // namespace gjcm
