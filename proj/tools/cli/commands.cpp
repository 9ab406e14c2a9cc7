#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <gjcm/dressed.hpp>
#include <gjcm/errors.hpp>
#include <gjcm/evolution.hpp>
#include <gjcm/fieldstate.hpp>
#include <gjcm/oracle.hpp>
#include <gjcm/parallel.hpp>

#include "CLI11.hpp"

namespace gjcm::cli {

namespace {

using nlohmann::json;

const std::vector<double> kTrendQg = {0.5e7, 1e7, 1.5e7};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read config file " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

OutputFile write_output(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  return {path, hex64(fnv1a(body))};
}

std::string header_line(const char* command, const RunConfig& config) {
  return std::string("# gravity-jcm ") + command + " config_hash=" + hex64(config_hash(config)) +
         "\n";
}

std::vector<double> sample_times(double t_max, int samples) {
  if (!(t_max > 0.0)) throw ValidationError("t-max", "time range is empty");
  if (samples < 2) throw ValidationError("samples", "need at least 2 samples");
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) t[k] = t_max * k / (samples - 1);
  return t;
}

std::string qg_label(double qg) { return format_real(qg); }

void write_manifest(const char* command, const ResolvedRun& run, CommandResult& result,
                    const std::filesystem::path& out_dir, double seconds) {
  json outputs = json::array();
  for (const auto& f : result.outputs) {
    outputs.push_back({{"path", f.path.generic_string()}, {"fnv1a", f.checksum}});
  }
  json manifest = {
      {"subcommand", command},
      {"config", json::parse(to_json(run.config))},
      {"config_hash", hex64(config_hash(run.config))},
      {"outputs", outputs},
      {"summary", result.summary},
      {"wall_clock_seconds", seconds},
  };
  const auto path = out_dir / (std::string("manifest_") + command + ".json");
  result.outputs.push_back(write_output(path, manifest.dump(2) + "\n"));
}

template <class Body>
CommandResult timed(const char* command, const CommandOptions& options,
                    const std::vector<double>& default_qg, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  const ResolvedRun run = resolve(options, default_qg);
  CommandResult result = body(run);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(command, run, result, options.out_dir, seconds);
  return result;
}

// ---- verification checks ----------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

template <class Body>
Check run_check(const std::string& name, Body&& body) {
  Check c;
  c.name = name;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("error: ") + e.what();
  }
  return c;
}

Check check_spectral(const RunConfig& config) {
  return run_check("spectral_consistency", [&](Check& c) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ratio(-10.0, 10.0);
    std::uniform_int_distribution<int> block(0, 50);
    const double lambda = config.physical.lambda();
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double delta = ratio(rng) * lambda;
      const int n = block(rng);
      const double omega = rabi_frequency(delta, lambda, n);
      const MixingAngles a = mixing_angles(delta, lambda, n);
      const double coupling = 2.0 * lambda * std::sqrt(n + 1.0);
      worst = std::max(worst, std::abs(a.sin_theta * a.sin_theta + a.cos_theta * a.cos_theta - 1.0));
      const double r0 = -delta * a.cos_theta + coupling * a.sin_theta - omega * a.cos_theta;
      const double r1 = coupling * a.cos_theta + delta * a.sin_theta - omega * a.sin_theta;
      worst = std::max(worst, std::hypot(r0, r1) / omega);
    }
    c.value = worst;
    c.tolerance = 1e-9;
    c.passed = worst <= c.tolerance;
  });
}

// Step giving a relative Doppler excursion near the rounding/truncation optimum.
double fd_step(const PhysicalParams& params, double p, double t, int n) {
  const DressedFrame f = dressed_frame(params, p, t, n);
  const double coupling = 2.0 * params.lambda() * std::sqrt(n + 1.0);
  const double curvature_share = (coupling / f.rabi) * (coupling / f.rabi);
  const double energy_ratio = (params.omega_c() * (n + 1.0) + f.rabi) / f.rabi;
  const double rel = std::pow(16.0 * 2.2e-16 * energy_ratio / curvature_share, 0.25);
  return rel * f.rabi * params.mass() / (params.q() * std::abs(params.cos_theta()));
}

Check check_effective_mass(const RunConfig& config) {
  return run_check("effective_mass_fd", [&](Check& c) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ratio(-10.0, 10.0);
    std::uniform_int_distribution<int> block(0, 50);
    const PhysicalParams& base = config.physical;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const PhysicalParams params = base.with_delta0(ratio(rng) * base.lambda());
      const int n = block(rng);
      const double closed = effective_mass(params, 0.0, 0.0, n).m_star;
      const double fd = effective_mass_fd(params, 0.0, 0.0, n, fd_step(params, 0.0, 0.0, n));
      worst = std::max(worst, std::abs(fd / closed - 1.0));
    }
    const double reference = effective_mass(base.with_delta0(0.0), 0.0, 0.0, 0).m_star;
    c.value = worst;
    c.tolerance = 1e-6;
    c.passed = worst <= c.tolerance;
    c.detail = "reference m* (Delta=0, n=0) = " + format_real(reference) + " kg";
  });
}

Check check_phase_integral(const RunConfig& config) {
  return run_check("phase_integral_closed_vs_quadrature", [&](Check& c) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> log_qg(0.0, std::log10(1.5e7));
    std::uniform_real_distribution<double> time(1e-6, 1.0);
    std::uniform_real_distribution<double> ratio(-10.0, 10.0);
    std::uniform_int_distribution<int> block(0, 60);
    const PhysicalParams& base = config.physical;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const PhysicalParams params =
          base.with_q_dot_g(std::pow(10.0, log_qg(rng))).with_delta0(ratio(rng) * base.lambda());
      const int n = block(rng);
      const double t = time(rng);
      const double closed = phase_integral_closed_form(params, 0.0, n, t);
      const double quad = phase_integral_quadrature(params, 0.0, n, t);
      worst = std::max(worst, std::abs(closed / quad - 1.0));
    }
    c.value = worst;
    c.tolerance = 1e-9;
    c.passed = worst <= c.tolerance;
  });
}

Check check_branch_continuity(const RunConfig& config) {
  return run_check("branch_continuity", [&](Check& c) {
    const double threshold = config.sim.branch_threshold;
    const double qg_limit = config.physical.q() * config.physical.g_accel();
    c.tolerance = 1e-9;
    if (threshold == 0.0 || qg_limit == 0.0) {
      c.passed = true;
      c.detail = "only one branch reachable";
      return;
    }
    if (1.1 * threshold > qg_limit) {
      c.value = threshold;
      c.passed = false;
      c.detail = "branch_threshold " + format_real(threshold) +
                 " leaves no admissible q.g above the switch (|q.g| <= " + format_real(qg_limit) +
                 ")";
      return;
    }
    // Both branches must agree on either side of the switch.
    const double t_half = half_revival_time(config.physical);
    double worst = 0.0;
    double endpoint_worst = 0.0;
    for (double factor : {0.9, 1.1}) {
      for (double sign : {1.0, -1.0}) {
        const PhysicalParams params = config.physical.with_q_dot_g(sign * factor * threshold);
        for (double t : {t_half, 1.0}) {
          for (int n : {0, 25, 60}) {
            const double quad = phase_integral_quadrature(params, 0.0, n, t);
            worst = std::max(worst, std::abs(phase_integral_closed_form(params, 0.0, n, t) / quad - 1.0));
            endpoint_worst = std::max(
                endpoint_worst, std::abs(phase_integral_endpoint_form(params, 0.0, n, t) / quad - 1.0));
          }
        }
      }
    }
    c.value = worst;
    c.passed = worst <= c.tolerance;
    c.detail = "literal endpoint form error at the switch " + format_real(endpoint_worst);
  });
}

Check check_unitarity(const RunConfig& config, int threads) {
  return run_check("unitarity_and_round_trip", [&](Check& c) {
    const InitialState initial = build_initial(config.sim, config.packet);
    const double t_half = half_revival_time(config.physical);
    double worst = 0.0;
    for (double qg : {0.0, 0.5e7, 1e7, 1.5e7}) {
      const PhysicalParams params = config.physical.with_q_dot_g(qg);
      for (double frac : {0.25, 0.5, 1.0}) {
        const EvolvedState s =
            evolve(initial, params, frac * t_half, config.sim.branch_threshold, threads);
        worst = std::max(worst, std::abs(s.norm() - initial_amplitudes(initial).norm()));
        const EvolvedState back = from_dressed(to_dressed(s, params, config.sim.branch_threshold), params, s.time);
        worst = std::max(worst, (back.psi1 - s.psi1).cwiseAbs().maxCoeff());
        worst = std::max(worst, (back.psi2 - s.psi2).cwiseAbs().maxCoeff());
      }
    }
    c.value = worst;
    c.tolerance = 1e-12;
    c.passed = worst <= c.tolerance;
  });
}

std::vector<Check> check_oracle(const RunConfig& config, int threads) {
  std::vector<Check> out;
  const double t_half = half_revival_time(config.physical);
  for (double qg : {0.0, 0.5e7, 1e7, 1.5e7}) {
    out.push_back(run_check("oracle_fidelity_qg_" + qg_label(qg), [&](Check& c) {
      const OdeRunReport report =
          compare_with_closed_form(config, config.physical.with_q_dot_g(qg), t_half, {}, threads);
      c.value = report.fidelity;
      c.tolerance = 0.999;
      c.passed = report.fidelity >= c.tolerance && report.max_norm_drift < 1e-10;
      c.detail = "max norm drift " + format_real(report.max_norm_drift) + ", steps " +
                 std::to_string(report.step_count);
    }));
  }
  return out;
}

Check check_wigner_dual() {
  return run_check("wigner_series_vs_quadrature", [&](Check& c) {
    // Rank-3 state on Fock 0..20.
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    const int dim = 21;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    const double probs[3] = {0.5, 0.3, 0.2};
    for (double pk : probs) {
      Eigen::VectorXcd v(dim);
      for (int k = 0; k < dim; ++k) v(k) = complex(gauss(rng), gauss(rng));
      v.normalize();
      rho += pk * v * v.adjoint();
    }
    const WignerQuadrature quad(rho);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    double worst = 0.0;
    for (int k = 0; k < 25; ++k) {
      const complex beta(coord(rng), coord(rng));
      worst = std::max(worst, std::abs(quad.evaluate(beta).value - wigner_series(rho, beta)));
    }
    c.value = worst;
    c.tolerance = 1e-6;
    c.passed = worst <= c.tolerance;
  });
}

Check check_wigner_anchors() {
  return run_check("wigner_analytic_anchors", [&](Check& c) {
    const int dim = 31;
    Eigen::MatrixXcd vacuum = Eigen::MatrixXcd::Zero(dim, dim);
    vacuum(0, 0) = 1.0;
    Eigen::MatrixXcd fock1 = Eigen::MatrixXcd::Zero(dim, dim);
    fock1(1, 1) = 1.0;
    double worst = std::abs(wigner_series(vacuum, 0.0) - 2.0 / kPi);
    worst = std::max(worst, std::abs(wigner_series(fock1, 0.0) + 2.0 / kPi));
    // Coherent |alpha>: W(beta) = (2/pi) exp(-2 |beta - alpha|^2).
    const complex alpha(1.0, -0.5);
    Eigen::VectorXcd v(dim);
    for (int k = 0; k < dim; ++k)
      v(k) = std::exp(-0.5 * std::norm(alpha) + static_cast<double>(k) * std::log(alpha) - 0.5 * std::lgamma(k + 1.0));
    const Eigen::MatrixXcd coherent = v * v.adjoint();
    for (const complex beta : {complex(0.0, 0.0), complex(1.0, -0.5), complex(0.3, 0.7), complex(-1.0, 1.0)}) {
      const double expected = 2.0 / kPi * std::exp(-2.0 * std::norm(beta - alpha));
      worst = std::max(worst, std::abs(wigner_series(coherent, beta) - expected));
    }
    c.value = worst;
    c.tolerance = 1e-9;
    c.passed = worst <= c.tolerance;
  });
}

std::vector<Check> check_density(const RunConfig& config, int threads) {
  std::vector<Check> out;
  const InitialState initial = build_initial(config.sim, config.packet);
  const double t_half = half_revival_time(config.physical);
  for (double qg : {0.0, 0.5e7, 1e7, 1.5e7}) {
    out.push_back(run_check("density_matrix_qg_" + qg_label(qg), [&](Check& c) {
      const PhysicalParams params = config.physical.with_q_dot_g(qg);
      const FieldDensityMatrix rho = reduced_density(
          evolve(initial, params, t_half, config.sim.branch_threshold, threads));
      const double herm = rho.hermiticity_error();
      const double trace_err = std::abs(rho.trace() - 1.0);
      const double min_eig = rho.min_eigenvalue();
      c.value = std::max({herm / 1e-12, trace_err / 1e-8, -min_eig / 1e-8});
      c.tolerance = 1.0;
      c.passed = herm <= 1e-12 && trace_err <= 1e-8 && min_eig >= -1e-8;
      c.detail = "hermiticity " + format_real(herm) + ", trace error " + format_real(trace_err) +
                 ", min eigenvalue " + format_real(min_eig);
    }));
  }
  return out;
}

json to_json_check(const Check& c) {
  return {{"name", c.name},
          {"passed", c.passed},
          {"value", c.value},
          {"tolerance", c.tolerance},
          {"detail", c.detail}};
}

}  // namespace

ResolvedRun resolve(const CommandOptions& options, const std::vector<double>& default_qg) {
  std::string text;
  if (options.config_path) {
    text = read_file(*options.config_path);
  } else if (auto env = config_path_from_env()) {
    text = read_file(*env);
  }
  json obj = json::parse(to_json(parse_config(text)));

  const bool trends = options.preset == "paper-trends";
  if (!options.preset.empty() && !trends)
    throw ValidationError("preset", "unknown preset '" + options.preset + "'");
  if (trends) obj["delta0"] = 2e7;
  if (options.delta0) obj["delta0"] = *options.delta0;
  if (options.grid) {
    obj["wigner_nx"] = options.grid->first;
    obj["wigner_ny"] = options.grid->second;
  }
  if (options.branch_threshold) obj["branch_threshold"] = *options.branch_threshold;

  ResolvedRun run{parse_config(obj.dump()), {}, 0, 0.0, 0.0};
  const double t_half = half_revival_time(run.config.physical);
  if (!options.qg.empty()) {
    run.qg = options.qg;
  } else if (trends) {
    run.qg = kTrendQg;
  } else if (!default_qg.empty()) {
    run.qg = default_qg;
  } else {
    run.qg = {run.config.physical.q_dot_g()};
  }
  for (double qg : run.qg) (void)run.config.physical.with_q_dot_g(qg);  // validates |q.g| <= q g

  run.n = options.n ? *options.n : static_cast<int>(std::lround(std::norm(run.config.sim.alpha)));
  if (run.n < 0) throw ValidationError("n", "must be >= 0");
  run.t_max = options.t_max ? *options.t_max : (trends ? 1.0 : t_half);
  run.t_snapshot = options.t ? *options.t : t_half;
  if (run.t_snapshot < 0.0) throw ValidationError("t", "must be >= 0");
  return run;
}

std::string eigenvalues_csv(const ResolvedRun& run, int samples) {
  const auto times = sample_times(run.t_max, samples);
  std::string out = header_line("eigenvalues", run.config);
  out += "lambda_t,qg,E_plus_over_hbar,E_minus_over_hbar\n";
  const double lambda = run.config.physical.lambda();
  for (double qg : run.qg) {
    const PhysicalParams params = run.config.physical.with_q_dot_g(qg);
    for (double t : times) {
      const EnergyPair e = energy_eigenvalues(params, 0.0, t, run.n);
      out += format_real(lambda * t) + "," + format_real(qg) + "," +
             format_real(e.plus / params.hbar()) + "," + format_real(e.minus / params.hbar()) + "\n";
    }
  }
  return out;
}

std::string eigenvalues_csv(const ResolvedRun& run) { return eigenvalues_csv(run, 201); }

std::string effective_mass_csv(const ResolvedRun& run, int samples) {
  const auto times = sample_times(run.t_max, samples);
  std::string out = header_line("effective-mass", run.config);
  out += "lambda_t,qg,m_star_kg\n";
  const double lambda = run.config.physical.lambda();
  for (double qg : run.qg) {
    const PhysicalParams params = run.config.physical.with_q_dot_g(qg);
    for (double t : times) {
      out += format_real(lambda * t) + "," + format_real(qg) + "," +
             format_real(effective_mass(params, 0.0, t, run.n).m_star) + "\n";
    }
  }
  return out;
}

std::string effective_mass_csv(const ResolvedRun& run) { return effective_mass_csv(run, 201); }

std::string evolve_csv(const ResolvedRun& run, double qg, int samples, int threads) {
  const auto times = sample_times(run.t_max, samples);
  const RunConfig& config = run.config;
  const InitialState initial = build_initial(config.sim, config.packet);
  const PhysicalParams params = config.physical.with_q_dot_g(qg);
  const double lambda = config.physical.lambda();
  std::vector<std::string> rows(times.size());
  parallel_for(static_cast<int>(times.size()), threads, [&](int k) {
    const EvolvedState s = evolve(initial, params, times[k], config.sim.branch_threshold);
    rows[k] = format_real(lambda * times[k]) + "," + format_real(s.norm()) + "," +
              format_real(atomic_inversion(s)) + "," + format_real(reduced_density(s).purity()) +
              "\n";
  });
  std::string out = header_line("evolve", config);
  out += "# qg=" + format_real(qg) + "\n";
  out += "lambda_t,norm,inversion,purity_of_rho_f\n";
  for (const auto& r : rows) out += r;
  return out;
}

json verify_report(const ResolvedRun& run, int threads) {
  const RunConfig& config = run.config;
  std::vector<Check> checks;
  checks.push_back(check_spectral(config));
  checks.push_back(check_effective_mass(config));
  checks.push_back(check_phase_integral(config));
  checks.push_back(check_branch_continuity(config));
  checks.push_back(check_unitarity(config, threads));
  for (auto& c : check_oracle(config, threads)) checks.push_back(std::move(c));
  checks.push_back(check_wigner_dual());
  checks.push_back(check_wigner_anchors());
  for (auto& c : check_density(config, threads)) checks.push_back(std::move(c));

  json list = json::array();
  json failures = json::array();
  for (const auto& c : checks) {
    list.push_back(to_json_check(c));
    if (!c.passed) failures.push_back(c.name);
  }
  return {{"config_hash", hex64(config_hash(config))},
          {"checks", list},
          {"failures", failures},
          {"passed", failures.empty()}};
}

CommandResult cmd_eigenvalues(const CommandOptions& options) {
  return timed("eigenvalues", options, kTrendQg, [&](const ResolvedRun& run) {
    CommandResult r;
    r.outputs.push_back(
        write_output(options.out_dir / "eigenvalues.csv", eigenvalues_csv(run, options.samples)));
    return r;
  });
}

CommandResult cmd_effective_mass(const CommandOptions& options) {
  return timed("effective-mass", options, kTrendQg, [&](const ResolvedRun& run) {
    CommandResult r;
    r.outputs.push_back(write_output(options.out_dir / "effective_mass.csv",
                                     effective_mass_csv(run, options.samples)));
    return r;
  });
}

CommandResult cmd_evolve(const CommandOptions& options) {
  return timed("evolve", options, {}, [&](const ResolvedRun& run) {
    CommandResult r;
    for (double qg : run.qg) {
      r.outputs.push_back(write_output(options.out_dir / ("evolve_qg_" + qg_label(qg) + ".csv"),
                                       evolve_csv(run, qg, options.samples, options.threads)));
    }
    return r;
  });
}

CommandResult cmd_wigner(const CommandOptions& options) {
  return timed("wigner", options, {}, [&](const ResolvedRun& run) {
    CommandResult r;
    const RunConfig& config = run.config;
    const InitialState initial = build_initial(config.sim, config.packet);
    const std::string hash = hex64(config_hash(config));
    json minima = json::array();
    for (double qg : run.qg) {
      const PhysicalParams params = config.physical.with_q_dot_g(qg);
      const EvolvedState s =
          evolve(initial, params, run.t_snapshot, config.sim.branch_threshold, options.threads);
      const FieldDensityMatrix rho = reduced_density(s, config_hash(config));
      const WignerGrid grid = wigner_map(rho, config.sim.wigner, options.threads);
      const std::vector<std::string> comment = {
          "gravity-jcm wigner config_hash=" + hash,
          "qg=" + format_real(qg) + " t=" + format_real(run.t_snapshot) +
              " min_w=" + format_real(grid.min_value) + " at X=" + format_real(grid.min_x) +
              " Y=" + format_real(grid.min_y)};
      const std::string stem = "wigner_qg_" + qg_label(qg);
      r.outputs.push_back(write_output(options.out_dir / (stem + ".csv"), wigner_csv(grid, comment)));
      r.outputs.push_back(write_output(options.out_dir / (stem + ".pgm"), wigner_pgm(grid, comment)));
      minima.push_back({{"qg", qg},
                        {"t", run.t_snapshot},
                        {"min_w", grid.min_value},
                        {"min_x", grid.min_x},
                        {"min_y", grid.min_y},
                        {"max_w", grid.max_value},
                        {"trace", rho.trace()},
                        {"purity", rho.purity()}});
    }
    r.summary["wigner"] = minima;
    return r;
  });
}

CommandResult cmd_verify(const CommandOptions& options) {
  return timed("verify", options, {}, [&](const ResolvedRun& run) {
    CommandResult r;
    const json report = verify_report(run, options.threads);
    r.outputs.push_back(write_output(options.out_dir / "verify.json", report.dump(2) + "\n"));
    r.summary["failures"] = report["failures"];
    r.exit_code = report["passed"].get<bool>() ? 0 : 1;
    return r;
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Gravity-modified Jaynes-Cummings simulator"};
  app.require_subcommand(1);

  CommandOptions options;
  std::string config_path;
  std::string grid;
  std::string out_dir = ".";
  double delta0 = 0.0;
  double t_max = 0.0;
  double t_snap = 0.0;
  double threshold = 0.0;
  int n = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (default: $GRAVITY_JCM_CONFIG)");
    sub->add_option("--qg", options.qg, "q.g value in 1/s^2 (repeatable)");
    sub->add_option("--n", n, "photon block index (default round(|alpha|^2))");
    sub->add_option("--delta0", delta0, "detuning at p = 0, t = 0 in rad/s");
    sub->add_option("--t-max", t_max, "end of the time window in s");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--grid", grid, "Wigner grid as NX,NY");
    sub->add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--samples", options.samples, "time samples")->check(CLI::Range(2, 1000000));
    sub->add_option("--preset", options.preset, "named preset (paper-trends)");
    sub->add_option("--branch-threshold", threshold, "|q.g| below which the phase uses quadrature");
  };

  CLI::App* eig = app.add_subcommand("eigenvalues", "dressed energies E+/- versus lambda t");
  CLI::App* mass = app.add_subcommand("effective-mass", "effective mass m* versus lambda t");
  CLI::App* evo = app.add_subcommand("evolve", "norm, inversion and field purity versus lambda t");
  CLI::App* wig = app.add_subcommand("wigner", "Wigner distribution of the cavity field");
  CLI::App* ver = app.add_subcommand("verify", "run the oracle suite and write verify.json");
  for (CLI::App* sub : {eig, mass, evo, wig, ver}) add_common(sub);
  wig->add_option("--t", t_snap, "snapshot time in s (default 7 pi / 2 lambda)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* active = app.get_subcommands().front();
  auto given = [&](const char* flag) { return active->count(flag) > 0; };
  if (given("--config")) options.config_path = config_path;
  if (given("--n")) options.n = n;
  if (given("--delta0")) options.delta0 = delta0;
  if (given("--t-max")) options.t_max = t_max;
  if (given("--branch-threshold")) options.branch_threshold = threshold;
  if (active == wig && given("--t")) options.t = t_snap;
  options.out_dir = out_dir;
  if (given("--grid")) {
    int nx = 0;
    int ny = 0;
    char comma = 0;
    std::istringstream in(grid);
    if (!(in >> nx >> comma >> ny) || comma != ',' || nx < 1 || ny < 1) {
      std::cerr << "error: --grid expects NX,NY\n";
      return 2;
    }
    options.grid = std::make_pair(nx, ny);
  }

  try {
    CommandResult result;
    if (active == eig) result = cmd_eigenvalues(options);
    else if (active == mass) result = cmd_effective_mass(options);
    else if (active == evo) result = cmd_evolve(options);
    else if (active == wig) result = cmd_wigner(options);
    else result = cmd_verify(options);
    for (const auto& f : result.outputs) std::cout << f.path.generic_string() << "\n";
    if (result.exit_code != 0 && result.summary.contains("failures")) {
      for (const auto& name : result.summary["failures"])
        std::cerr << "FAILED: " << name.get<std::string>() << "\n";
    }
    return result.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gjcm::cli
