// Command-line front end. Links against the C API only.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptycho/ptycho.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(ptycho_status status) {
  switch (status) {
    case PTYCHO_OK: return 0;
    case PTYCHO_ERROR_NUMERIC: return kExitNumeric;
    default: return kExitConfig;
  }
}

// Aborts the command on failure, reporting the library error.
void check(ptycho_status status, const char* what) {
  if (status == PTYCHO_OK) return;
  std::cerr << "error: " << what << ": " << ptycho_last_error() << "\n";
  std::exit(exit_code_for(status));
}

struct ScenarioHandle {
  ptycho_scenario* ptr = nullptr;
  ~ScenarioHandle() { ptycho_scenario_free(ptr); }
};

ptycho_algorithm parse_algorithm(const std::string& name) {
  if (name == "ml") return PTYCHO_ALGORITHM_ML;
  if (name == "amp") return PTYCHO_ALGORITHM_AMP;
  std::cerr << "error: unknown algorithm '" << name << "' (expected ml or amp)\n";
  std::exit(kExitConfig);
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::int64_t trial) {
  ScenarioHandle scenario;
  check(ptycho_scenario_from_file(config_path.c_str(), &scenario.ptr),
        "loading config");

  std::uint64_t seed = 0;
  check(ptycho_scenario_seed(scenario.ptr, &seed), "reading seed");

  ptycho_stack* expected = nullptr;
  check(ptycho_expected_counts(scenario.ptr, &expected), "forward model");
  ptycho_stack* noisy = nullptr;
  check(ptycho_sample_counts(scenario.ptr, expected, seed,
                             static_cast<std::uint64_t>(trial), 1, &noisy),
        "sampling counts");

  fs::create_directories(out_dir);
  check(ptycho_stack_save(noisy, out_dir.c_str(), seed,
                          static_cast<std::uint64_t>(trial)),
        "writing stacks");
  ptycho_stack_free(noisy);
  ptycho_stack_free(expected);

  std::ifstream src(config_path, std::ios::binary);
  std::ofstream dst(fs::path(out_dir) / "scenario.json", std::ios::binary);
  dst << src.rdbuf();

  std::cout << "wrote expected and observed stacks to " << out_dir << "\n";
  return 0;
}

int run_crlb(const std::string& config_path, double fisher_tol,
             const std::string& out_dir) {
  ScenarioHandle scenario;
  check(ptycho_scenario_from_file(config_path.c_str(), &scenario.ptr),
        "loading config");
  ptycho_crlb* crlb = nullptr;
  check(ptycho_compute_crlb(scenario.ptr, fisher_tol, &crlb),
        "computing the bound");
  check(ptycho_crlb_save(crlb, out_dir.c_str()), "writing bound maps");
  int32_t rank = 0;
  ptycho_crlb_rank(crlb, &rank);
  ptycho_crlb_free(crlb);
  std::cout << "wrote crlb_A / crlb_phi to " << out_dir
            << " (fisher rank " << rank << ")\n";
  return 0;
}

int run_reconstruct(const std::string& config_path, const std::string& algorithm,
                    const std::string& data_dir, const std::string& out_dir) {
  ScenarioHandle scenario;
  check(ptycho_scenario_from_file(config_path.c_str(), &scenario.ptr),
        "loading config");
  ptycho_stack* data = nullptr;
  check(ptycho_stack_load(data_dir.c_str(), &data), "loading measurement stacks");

  fs::create_directories(out_dir);
  const std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
  ptycho_estimate* estimate = nullptr;
  const ptycho_status status =
      ptycho_reconstruct(scenario.ptr, data, parse_algorithm(algorithm),
                         nullptr, trace_path.c_str(), &estimate);
  ptycho_stack_free(data);
  check(status, "reconstruction");
  check(ptycho_estimate_save(estimate, out_dir.c_str()), "writing estimate");
  ptycho_estimate_free(estimate);
  std::cout << "wrote estimate_A / estimate_phi and trace.csv to " << out_dir
            << "\n";
  return 0;
}

int run_montecarlo(const std::string& config_path, const std::string& algorithm,
                   int trials, int repeats, std::int64_t seed_flag,
                   double fisher_tol, const std::string& out_dir) {
  ScenarioHandle scenario;
  check(ptycho_scenario_from_file(config_path.c_str(), &scenario.ptr),
        "loading config");

  std::uint64_t seed = 0;
  if (seed_flag >= 0) {
    seed = static_cast<std::uint64_t>(seed_flag);
  } else {
    check(ptycho_scenario_seed(scenario.ptr, &seed), "reading seed");
  }

  ptycho_mc* mc = nullptr;
  check(ptycho_run_campaign(scenario.ptr, parse_algorithm(algorithm), trials,
                            repeats, seed, nullptr, &mc),
        "campaign");
  ptycho_crlb* crlb = nullptr;
  check(ptycho_compute_crlb(scenario.ptr, fisher_tol, &crlb),
        "computing the bound");
  check(ptycho_mc_save(mc, crlb, out_dir.c_str()), "writing campaign outputs");
  ptycho_crlb_free(crlb);
  ptycho_mc_free(mc);
  std::cout << "wrote statistics maps, bound maps, aggregate.csv and "
               "manifest.json to "
            << out_dir << "\n";
  return 0;
}

int run_report(const std::vector<std::string>& in_dirs,
               const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitConfig;
  }
  out << ptycho_campaign_csv_header() << "\n";
  for (const std::string& dir : in_dirs) {
    char row[512];
    check(ptycho_campaign_csv_row(dir.c_str(), row, sizeof row),
          "summarizing campaign");
    out << row << "\n";
  }
  std::cout << "wrote " << out_path << " (" << in_dirs.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ptychography simulation, CRLB computation and Monte Carlo "
               "estimator benchmarking"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_dir, algorithm = "ml", out_path;
  std::vector<std::string> in_dirs;
  double fisher_tol = -1.0;
  int trials = 100;
  int repeats = 1;
  std::int64_t seed = -1;
  std::int64_t trial = 0;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate expected and Poisson-noisy diffraction stacks");
  simulate->add_option("--config", config_path, "Scenario config JSON")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--trial", trial, "Trial index labeling the noise stream");

  CLI::App* crlb = app.add_subcommand(
      "crlb", "Assemble the Fisher matrix and compute per-pixel bounds");
  crlb->add_option("--config", config_path, "Scenario config JSON")->required();
  crlb->add_option("--fisher-tol", fisher_tol,
                   "Relative eigenvalue cutoff (default K*eps)");
  crlb->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "Conjugate-gradient reconstruction from saved stacks");
  reconstruct->add_option("--config", config_path, "Scenario config JSON")->required();
  reconstruct->add_option("--algorithm", algorithm, "ml or amp")->required();
  reconstruct->add_option("--data", data_dir, "Directory with observed stacks")->required();
  reconstruct->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* montecarlo = app.add_subcommand(
      "montecarlo", "Monte Carlo campaign with per-pixel statistics");
  montecarlo->add_option("--config", config_path, "Scenario config JSON")->required();
  montecarlo->add_option("--algorithm", algorithm, "ml or amp")->required();
  montecarlo->add_option("--trials", trials, "Number of trials")->required();
  montecarlo->add_option("--repeats", repeats, "Measurements averaged per trial");
  montecarlo->add_option("--seed", seed, "Master seed (default: config seed)");
  montecarlo->add_option("--fisher-tol", fisher_tol,
                         "Relative eigenvalue cutoff (default K*eps)");
  montecarlo->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* report = app.add_subcommand(
      "report", "Merge campaign aggregates into one summary CSV");
  report->add_option("--in", in_dirs, "Campaign directories")->required();
  report->add_option("--out", out_path, "Summary CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (simulate->parsed()) return run_simulate(config_path, out_dir, trial);
  if (crlb->parsed()) return run_crlb(config_path, fisher_tol, out_dir);
  if (reconstruct->parsed())
    return run_reconstruct(config_path, algorithm, data_dir, out_dir);
  if (montecarlo->parsed())
    return run_montecarlo(config_path, algorithm, trials, repeats, seed,
                          fisher_tol, out_dir);
  if (report->parsed()) return run_report(in_dirs, out_path);
  return kExitConfig;
}
