// teleop_sim: run, sweep and self-check front end.
//
// Exit codes: 0 success, 2 configuration error, 3 simulation error.

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "teleop/csv.hpp"
#include "teleop/errors.hpp"
#include "teleop/scenario.hpp"
#include "teleop/selfcheck.hpp"
#include "teleop/simrunner.hpp"

namespace fs = std::filesystem;
using namespace teleop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;

std::optional<std::uint64_t> seed_override() {
  const char* env = std::getenv("SIM_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || *env == '-') throw ConfigError("SIM_SEED", "expected a non-negative integer");
  return v;
}

ScenarioConfig load(const std::string& path) {
  ScenarioConfig cfg = load_scenario(path);
  if (auto s = seed_override()) cfg.seed = *s;
  return cfg;
}

std::ofstream open_out(const fs::path& dir, const char* name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

int cmd_run(const std::string& scenario, const fs::path& out) {
  const ScenarioConfig cfg = load(scenario);
  std::ofstream log = open_out(out, "log.csv");
  write_log_header(log);
  const Metrics m = run(cfg, [&log](const TickLog& row) { write_log_row(log, row); });
  std::ofstream metrics = open_out(out, "metrics.csv");
  write_metrics(metrics, m);
  std::ofstream summary = open_out(out, "summary.txt");
  write_summary(summary, cfg, m);
  std::cout << "wrote " << (out / "log.csv").string() << ", metrics.csv, summary.txt (" << m.ticks << " ticks)\n";
  return kExitOk;
}

int cmd_sweep(const std::string& scenario, const std::string& gains_file, const fs::path& out) {
  const ScenarioConfig cfg = load(scenario);
  const std::vector<CompGains> gains = load_gains(gains_file);
  const std::vector<SweepRow> rows = sweep(cfg, gains);
  std::ofstream os = open_out(out, "sweep.csv");
  write_sweep(os, rows);
  std::cout << "wrote " << (out / "sweep.csv").string() << " (" << rows.size() << " runs)\n";
  return kExitOk;
}

int cmd_check() {
  bool all = true;
  for (const SuiteResult& r : run_self_checks()) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
    all = all && r.pass;
  }
  return all ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral teleoperation simulator with passivity control and drift compensation"};
  app.require_subcommand(1);

  std::string scenario;
  std::string gains;
  std::string out;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and write log.csv, metrics.csv, summary.txt");
  run_cmd->add_option("scenario", scenario, "Scenario file")->required();
  run_cmd->add_option("--out", out, "Output directory")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one compensated scenario per gain set, write sweep.csv");
  sweep_cmd->add_option("scenario", scenario, "Scenario file")->required();
  sweep_cmd->add_option("--gains", gains, "Gain list file")->required();
  sweep_cmd->add_option("--out", out, "Output directory")->required();

  CLI::App* check_cmd = app.add_subcommand("check", "Run the built-in invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, out);
    if (*sweep_cmd) return cmd_sweep(scenario, gains, out);
    if (*check_cmd) return cmd_check();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSimulation;
  }
  return kExitOk;
}
