#include "doctest.h"

#include <gjcm/dressed.hpp>
#include <gjcm/errors.hpp>
#include <gjcm/fieldstate.hpp>

#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace gjcm;
using namespace gjcm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gjcm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<double>> rows_of(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(GJCM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("resolve: defaults, preset and flag precedence") {
  ::unsetenv("GRAVITY_JCM_CONFIG");
  const ResolvedRun d = resolve({}, {});
  CHECK(d.n == 25);
  CHECK(d.qg == std::vector<double>{0.0});
  CHECK(d.t_max == doctest::Approx(half_revival_time(default_params())));
  CHECK(d.t_snapshot == d.t_max);

  CommandOptions trends;
  trends.preset = "paper-trends";
  const ResolvedRun t = resolve(trends, {});
  CHECK(t.config.physical.delta0() == 2e7);
  CHECK(t.t_max == 1.0);
  CHECK(t.qg == std::vector<double>{0.5e7, 1e7, 1.5e7});

  trends.delta0 = 3e7;
  trends.qg = {2e6};
  trends.n = 4;
  const ResolvedRun o = resolve(trends, {});
  CHECK(o.config.physical.delta0() == 3e7);
  CHECK(o.qg == std::vector<double>{2e6});
  CHECK(o.n == 4);

  CommandOptions bad;
  bad.preset = "nope";
  CHECK_THROWS_AS(resolve(bad, {}), ValidationError);
  CommandOptions too_steep;
  too_steep.qg = {1e9};
  CHECK_THROWS_AS(resolve(too_steep, {}), ValidationError);
}

TEST_CASE("resolve: config file beats the environment") {
  const fs::path dir = scratch("config");
  std::ofstream(dir / "env.json") << R"({"lambda": 2e6})";
  std::ofstream(dir / "flag.json") << R"({"lambda": 3e6})";
  ::setenv("GRAVITY_JCM_CONFIG", (dir / "env.json").c_str(), 1);
  CHECK(resolve({}, {}).config.physical.lambda() == 2e6);
  CommandOptions o;
  o.config_path = dir / "flag.json";
  CHECK(resolve(o, {}).config.physical.lambda() == 3e6);
  ::unsetenv("GRAVITY_JCM_CONFIG");
}

TEST_CASE("eigenvalues: three curve pairs with gap 2 Omega") {
  const ResolvedRun run = resolve({}, {0.5e7, 1e7, 1.5e7});
  const std::string csv = eigenvalues_csv(run, 11);
  CHECK(csv.rfind("# gravity-jcm eigenvalues config_hash=" + hex64(config_hash(run.config)) + "\n", 0) == 0);
  CHECK(csv.find("lambda_t,qg,E_plus_over_hbar,E_minus_over_hbar\n") != std::string::npos);
  const auto rows = rows_of(csv);
  REQUIRE(rows.size() == 33);
  const double lambda = run.config.physical.lambda();
  for (const auto& r : rows) {
    const PhysicalParams p = run.config.physical.with_q_dot_g(r[1]);
    const double omega = rabi_frequency(p, 0.0, r[0] / lambda, 25);
    CHECK((r[2] - r[3]) / (2.0 * omega) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[10][0] == doctest::Approx(lambda * run.t_max).epsilon(1e-15));
}

TEST_CASE("eigenvalues: decoupled limit is flat and degenerate") {
  const fs::path dir = scratch("weak");
  std::ofstream(dir / "weak.json") << R"({"lambda": 1e-9})";
  CommandOptions o;
  o.config_path = dir / "weak.json";
  o.t_max = 1e-5;
  for (const auto& r : rows_of(eigenvalues_csv(resolve(o, {0.0}), 5))) {
    CHECK(r[2] == doctest::Approx(9e7 * 26).epsilon(1e-15));
    CHECK(r[3] == doctest::Approx(9e7 * 26).epsilon(1e-15));
  }
}

TEST_CASE("eigenvalues: gap shrinks over the window when the chirp stays above resonance") {
  CommandOptions o;
  o.delta0 = 2e7;
  o.t_max = 1.0;
  const auto rows = rows_of(eigenvalues_csv(resolve(o, {1.5e7}), 51));
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k][2] - rows[k][3] < rows[k - 1][2] - rows[k - 1][3]);
}

TEST_CASE("eigenvalues: an empty time range is a usage error") {
  CommandOptions o;
  o.t_max = 0.0;
  CHECK_THROWS_AS(eigenvalues_csv(resolve(o, {}), 11), ValidationError);
  o.t_max = 1.0;
  CHECK_THROWS_AS(eigenvalues_csv(resolve(o, {}), 1), ValidationError);
}

TEST_CASE("effective mass: rows equal the dressed-module value") {
  CommandOptions o;
  o.preset = "paper-trends";
  const ResolvedRun run = resolve(o, {});
  const auto rows = rows_of(effective_mass_csv(run, 21));
  REQUIRE(rows.size() == 63);
  for (const auto& r : rows) {
    const PhysicalParams p = run.config.physical.with_q_dot_g(r[1]);
    CHECK(r[2] == doctest::Approx(effective_mass(p, 0.0, r[0] / p.lambda(), run.n).m_star).epsilon(1e-13));
  }
  // Final samples (t = 1 s): m* falls as q.g grows.
  CHECK(rows[62][2] < rows[41][2]);
  CHECK(rows[41][2] < rows[20][2]);
}

TEST_CASE("effective mass: no gravity acts at t = 0") {
  const auto rows = rows_of(effective_mass_csv(resolve({}, {0.5e7, 1e7, 1.5e7}), 2));
  CHECK(rows[0][2] == rows[2][2]);
  CHECK(rows[2][2] == rows[4][2]);
}

TEST_CASE("effective mass: perpendicular geometry is a typed error") {
  const fs::path dir = scratch("perp");
  std::ofstream(dir / "perp.json") << R"({"theta": 1.5707963267948966})";
  CommandOptions o;
  o.config_path = dir / "perp.json";
  CHECK_THROWS_AS(effective_mass_csv(resolve(o, {}), 3), SingularGeometryError);
}

TEST_CASE("evolve: unitarity and the initial row") {
  const ResolvedRun run = resolve({}, {});
  const std::string csv = evolve_csv(run, 0.0, 9, 2);
  CHECK(csv.find("lambda_t,norm,inversion,purity_of_rho_f\n") != std::string::npos);
  const auto rows = rows_of(csv);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rows[0][2]) < 1e-15);
  CHECK(rows[0][3] == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& r : rows) CHECK(std::abs(r[1] - 1.0) < 1e-12);
  CHECK(evolve_csv(run, 0.0, 9, 1) == csv);
}

TEST_CASE("wigner: vacuum at t = 0 is a positive blob") {
  const fs::path dir = scratch("vac");
  std::ofstream(dir / "vac.json") << R"({"alpha": 0, "wigner_nx": 21, "wigner_ny": 21})";
  CommandOptions o;
  o.config_path = dir / "vac.json";
  o.t = 0.0;
  o.out_dir = dir;
  const CommandResult r = cmd_wigner(o);
  CHECK(r.exit_code == 0);
  const auto& entry = r.summary["wigner"][0];
  CHECK(entry["min_w"].get<double>() >= -1e-9);
  CHECK(entry["max_w"].get<double>() == doctest::Approx(2.0 / kPi).epsilon(1e-14));
  CHECK(fs::exists(dir / "wigner_qg_0.csv"));
  CHECK(fs::exists(dir / "wigner_qg_0.pgm"));
  CHECK(fs::exists(dir / "manifest_wigner.json"));
}

TEST_CASE("outputs carry the config hash and reproduce byte for byte") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  CommandOptions o;
  o.qg = {0.0, 1.5e7};
  o.grid = std::make_pair(25, 25);
  o.samples = 7;
  o.out_dir = a;
  o.threads = 1;
  const CommandResult ra = cmd_wigner(o);
  const CommandResult ea = cmd_evolve(o);
  o.out_dir = b;
  o.threads = 3;
  const CommandResult rb = cmd_wigner(o);
  const CommandResult eb = cmd_evolve(o);

  const std::string hash = hex64(config_hash(resolve(o, {}).config));
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    const std::string body = slurp(entry.path());
    CHECK_MESSAGE(body.find(hash) != std::string::npos, name);
    if (name.rfind("manifest_", 0) == 0) continue;  // carries the wall-clock duration
    CHECK_MESSAGE(body == slurp(b / name), name);
    ++compared;
  }
  CHECK(compared == 6);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest_wigner.json"));
  CHECK(manifest["subcommand"] == "wigner");
  CHECK(manifest["outputs"].size() == 4);
  CHECK(manifest["outputs"][0]["fnv1a"] == hex64(fnv1a(slurp(a / "wigner_qg_0.csv"))));
  CHECK(manifest.contains("wall_clock_seconds"));
  CHECK(manifest["config"]["wigner_nx"] == 25);
  // Gravity suppresses the negativity even on the coarse grid.
  CHECK(ra.summary["wigner"][1]["min_w"].get<double>() > ra.summary["wigner"][0]["min_w"].get<double>());
  (void)rb;
  (void)ea;
  (void)eb;
}

TEST_CASE("binary: help, usage errors and verify exit codes") {
  const fs::path dir = scratch("bin");
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("verify --help") == 0);
  CHECK(run_binary("") != 0);
  CHECK(run_binary("frobnicate") != 0);
  CHECK(run_binary("wigner --grid 12 --out " + dir.string()) != 0);
  CHECK(run_binary("eigenvalues --t-max 0 --out " + dir.string()) != 0);
  CHECK(run_binary("eigenvalues --qg 1e7 --qg 2e7 --samples 3 --out " + dir.string()) == 0);
  CHECK(rows_of(slurp(dir / "eigenvalues.csv")).size() == 6);

  CHECK(run_binary("verify --out " + (dir / "good").string()) == 0);
  const auto good = nlohmann::json::parse(slurp(dir / "good" / "verify.json"));
  CHECK(good["passed"] == true);
  CHECK(good["checks"].size() >= 10);

  CHECK(run_binary("verify --branch-threshold 1e9 --out " + (dir / "bad").string()) == 1);
  const auto bad = nlohmann::json::parse(slurp(dir / "bad" / "verify.json"));
  CHECK(bad["passed"] == false);
  CHECK(bad["failures"] == nlohmann::json::array({"branch_continuity"}));
}
