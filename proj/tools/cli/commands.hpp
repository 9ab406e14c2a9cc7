#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gjcm/params.hpp>

#include "json.hpp"

namespace gjcm::cli {

struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::vector<double> qg;
  std::optional<int> n;
  std::optional<double> delta0;
  std::optional<double> t_max;
  std::optional<double> t;  // wigner snapshot time
  std::optional<std::pair<int, int>> grid;
  std::optional<double> branch_threshold;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  int samples = 201;
  std::string preset;  // "" or "paper-trends"
};

struct OutputFile {
  std::filesystem::path path;
  std::string checksum;  // FNV-1a, hex
};

struct CommandResult {
  int exit_code = 0;
  std::vector<OutputFile> outputs;
  nlohmann::json summary = nlohmann::json::object();
};

// Settings after the config file, environment, preset and flags are merged.
struct ResolvedRun {
  RunConfig config;
  std::vector<double> qg;
  int n = 25;
  double t_max = 0.0;
  double t_snapshot = 0.0;
};

// Precedence: flags > preset > --config file > GRAVITY_JCM_CONFIG > defaults.
ResolvedRun resolve(const CommandOptions& options, const std::vector<double>& default_qg);

// CSV bodies; the first line is "# gravity-jcm <command> config_hash=<hex>".
// Time samples are t_k = t_max k / (samples - 1).
std::string eigenvalues_csv(const ResolvedRun& run, int samples);
std::string eigenvalues_csv(const ResolvedRun& run);
std::string effective_mass_csv(const ResolvedRun& run, int samples);
std::string effective_mass_csv(const ResolvedRun& run);
std::string evolve_csv(const ResolvedRun& run, double qg, int samples, int threads);

// Verification report. report["passed"] is true iff every check passed.
nlohmann::json verify_report(const ResolvedRun& run, int threads);

CommandResult cmd_eigenvalues(const CommandOptions& options);
CommandResult cmd_effective_mass(const CommandOptions& options);
CommandResult cmd_evolve(const CommandOptions& options);
CommandResult cmd_wigner(const CommandOptions& options);
CommandResult cmd_verify(const CommandOptions& options);

// Entry point shared by main() and the CLI tests.
int run_cli(int argc, const char* const* argv);

}  // namespace gjcm::cli
