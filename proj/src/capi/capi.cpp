#include "ptycho/ptycho.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../core/io.hpp"
#include "../core/montecarlo.hpp"
#include "../core/noise.hpp"
#include "../core/scenario.hpp"

namespace fs = std::filesystem;

namespace {

thread_local std::string g_last_error;

ptycho_status status_from(const ptycho::Error& e) {
  switch (e.code()) {
    case ptycho::ErrorCode::invalid_argument:
      return PTYCHO_ERROR_INVALID_ARGUMENT;
    case ptycho::ErrorCode::config:
      return PTYCHO_ERROR_CONFIG;
    case ptycho::ErrorCode::numeric:
      return PTYCHO_ERROR_NUMERIC;
    case ptycho::ErrorCode::io:
      return PTYCHO_ERROR_IO;
  }
  return PTYCHO_ERROR_INVALID_ARGUMENT;
}

template <typename Fn>
ptycho_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PTYCHO_OK;
  } catch (const ptycho::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PTYCHO_ERROR_NUMERIC;
  }
}

ptycho_status require(bool condition, const char* message) {
  if (condition) return PTYCHO_OK;
  g_last_error = message;
  return PTYCHO_ERROR_INVALID_ARGUMENT;
}

ptycho::Algorithm to_algorithm(ptycho_algorithm a) {
  return a == PTYCHO_ALGORITHM_ML ? ptycho::Algorithm::max_likelihood
                                  : ptycho::Algorithm::amplitude;
}

}  // namespace

struct ptycho_scenario {
  ptycho::ConfigFile config;
  ptycho::Scenario built;
};

struct ptycho_stack {
  ptycho::DiffractionStack stack;
};

struct ptycho_crlb {
  ptycho::CrlbMap map;
};

struct ptycho_estimate {
  ptycho::ObjectEstimate estimate;
};

struct ptycho_mc {
  ptycho::McStatistics stats;
  ptycho::ConfigFile config;
  ptycho::Algorithm algorithm = ptycho::Algorithm::max_likelihood;
  int trials = 0;
  int repeats = 1;
  std::uint64_t master_seed = 0;
};

namespace {

ptycho::CgConfig resolve_options(const ptycho_scenario* scenario,
                                 ptycho::Algorithm algorithm,
                                 const ptycho_cg_options* options) {
  ptycho::CgConfig cg = ptycho::resolve_cg_config(scenario->config, algorithm);
  if (options) {
    if (options->max_iterations > 0) cg.max_iterations = options->max_iterations;
    if (options->objective_change_stop >= 0.0)
      cg.objective_change_stop = options->objective_change_stop;
    if (options->gamma_initial >= 0.0) cg.gamma_initial = options->gamma_initial;
    if (options->gamma_after >= 0.0) cg.gamma_after = options->gamma_after;
    if (options->gamma_switch_iteration > 0)
      cg.gamma_switch_iteration = options->gamma_switch_iteration;
  }
  return cg;
}

}  // namespace

extern "C" {

const char* ptycho_version(void) { return "1.0.0"; }

const char* ptycho_last_error(void) { return g_last_error.c_str(); }

ptycho_status ptycho_scenario_from_json(const char* json_text,
                                        ptycho_scenario** out) {
  if (ptycho_status s = require(json_text && out, "null argument")) return s;
  return guarded([&] {
    auto scenario = std::make_unique<ptycho_scenario>();
    scenario->config = ptycho::parse_config_json(json_text);
    scenario->built = ptycho::build_case(scenario->config.scenario);
    *out = scenario.release();
  });
}

ptycho_status ptycho_scenario_from_file(const char* path,
                                        ptycho_scenario** out) {
  if (ptycho_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    auto scenario = std::make_unique<ptycho_scenario>();
    scenario->config = ptycho::load_config_file(path);
    scenario->built = ptycho::build_case(scenario->config.scenario);
    *out = scenario.release();
  });
}

void ptycho_scenario_free(ptycho_scenario* scenario) { delete scenario; }

ptycho_status ptycho_scenario_object_size(const ptycho_scenario* scenario,
                                          int32_t* nx, int32_t* ny) {
  if (ptycho_status s = require(scenario && nx && ny, "null argument")) return s;
  *nx = scenario->built.truth.grid().nx;
  *ny = scenario->built.truth.grid().ny;
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_detector_size(const ptycho_scenario* scenario,
                                            int32_t* nx, int32_t* ny) {
  if (ptycho_status s = require(scenario && nx && ny, "null argument")) return s;
  *nx = scenario->built.probe.field.grid.nx;
  *ny = scenario->built.probe.field.grid.ny;
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_num_positions(const ptycho_scenario* scenario,
                                            int32_t* count) {
  if (ptycho_status s = require(scenario && count, "null argument")) return s;
  *count = static_cast<int32_t>(scenario->built.scan.offsets.size());
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_case_id(const ptycho_scenario* scenario,
                                      int32_t* case_id) {
  if (ptycho_status s = require(scenario && case_id, "null argument")) return s;
  *case_id = scenario->built.spec.case_id;
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_photon_number(const ptycho_scenario* scenario,
                                            double* pn) {
  if (ptycho_status s = require(scenario && pn, "null argument")) return s;
  *pn = scenario->built.spec.photon_number;
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_seed(const ptycho_scenario* scenario,
                                   uint64_t* seed) {
  if (ptycho_status s = require(scenario && seed, "null argument")) return s;
  *seed = scenario->built.spec.seed;
  return PTYCHO_OK;
}

ptycho_status ptycho_scenario_truth(const ptycho_scenario* scenario,
                                    double* transmission, double* phase) {
  if (ptycho_status s = require(scenario && transmission && phase, "null argument"))
    return s;
  const auto& truth = scenario->built.truth;
  std::memcpy(transmission, truth.transmission.values.data(),
              truth.transmission.values.size() * sizeof(double));
  std::memcpy(phase, truth.phase.values.data(),
              truth.phase.values.size() * sizeof(double));
  return PTYCHO_OK;
}

ptycho_status ptycho_expected_counts(const ptycho_scenario* scenario,
                                     ptycho_stack** out) {
  if (ptycho_status s = require(scenario && out, "null argument")) return s;
  return guarded([&] {
    auto stack = std::make_unique<ptycho_stack>();
    stack->stack = ptycho::expected_counts(scenario->built.probe,
                                           scenario->built.truth,
                                           scenario->built.scan);
    *out = stack.release();
  });
}

ptycho_status ptycho_sample_counts(const ptycho_scenario* scenario,
                                   const ptycho_stack* expected,
                                   uint64_t master_seed, uint64_t trial,
                                   int32_t repeats, ptycho_stack** out) {
  if (ptycho_status s = require(scenario && expected && out, "null argument"))
    return s;
  if (ptycho_status s = require(repeats >= 1, "repeats must be >= 1")) return s;
  return guarded([&] {
    auto result = std::make_unique<ptycho_stack>();
    if (repeats == 1) {
      result->stack = ptycho::sample_poisson_stack(
          expected->stack, ptycho::RngSeed{master_seed, trial});
    } else {
      std::vector<ptycho::DiffractionStack> draws;
      draws.reserve(static_cast<size_t>(repeats));
      for (int32_t rho = 0; rho < repeats; ++rho)
        draws.push_back(ptycho::sample_poisson_stack(
            expected->stack,
            ptycho::RngSeed{master_seed,
                            trial * static_cast<uint64_t>(repeats) + rho}));
      result->stack = ptycho::average_measurements(draws);
    }
    *out = result.release();
  });
}

ptycho_status ptycho_stack_num_positions(const ptycho_stack* stack,
                                         int32_t* count) {
  if (ptycho_status s = require(stack && count, "null argument")) return s;
  *count = stack->stack.positions();
  return PTYCHO_OK;
}

ptycho_status ptycho_stack_plane_size(const ptycho_stack* stack, int32_t* nx,
                                      int32_t* ny) {
  if (ptycho_status s = require(stack && nx && ny, "null argument")) return s;
  if (ptycho_status s = require(stack->stack.positions() > 0, "empty stack"))
    return s;
  *nx = stack->stack.detector_grid().nx;
  *ny = stack->stack.detector_grid().ny;
  return PTYCHO_OK;
}

ptycho_status ptycho_stack_get_plane(const ptycho_stack* stack, int32_t kind,
                                     int32_t position, double* out) {
  if (ptycho_status s = require(stack && out, "null argument")) return s;
  const auto& planes =
      kind == 0 ? stack->stack.expected : stack->stack.observed;
  if (ptycho_status s = require(
          position >= 0 && position < static_cast<int32_t>(planes.size()),
          "plane index out of range"))
    return s;
  const auto& plane = planes[static_cast<size_t>(position)];
  std::memcpy(out, plane.values.data(), plane.values.size() * sizeof(double));
  return PTYCHO_OK;
}

ptycho_status ptycho_stack_save(const ptycho_stack* stack, const char* dir,
                                uint64_t master_seed, uint64_t trial) {
  if (ptycho_status s = require(stack && dir, "null argument")) return s;
  return guarded([&] { ptycho::save_stack(dir, stack->stack, master_seed, trial); });
}

ptycho_status ptycho_stack_load(const char* dir, ptycho_stack** out) {
  if (ptycho_status s = require(dir && out, "null argument")) return s;
  return guarded([&] {
    auto stack = std::make_unique<ptycho_stack>();
    stack->stack = ptycho::load_stack(dir);
    *out = stack.release();
  });
}

void ptycho_stack_free(ptycho_stack* stack) { delete stack; }

ptycho_status ptycho_compute_crlb(const ptycho_scenario* scenario,
                                  double rel_tol, ptycho_crlb** out) {
  if (ptycho_status s = require(scenario && out, "null argument")) return s;
  return guarded([&] {
    auto crlb = std::make_unique<ptycho_crlb>();
    const ptycho::FisherMatrix fisher =
        ptycho::assemble_fisher(scenario->built.probe, scenario->built.truth,
                                scenario->built.scan);
    crlb->map = ptycho::crlb_from_fisher(fisher, rel_tol);
    *out = crlb.release();
  });
}

ptycho_status ptycho_crlb_get(const ptycho_crlb* crlb, double* transmission,
                              double* phase) {
  if (ptycho_status s = require(crlb && transmission && phase, "null argument"))
    return s;
  std::memcpy(transmission, crlb->map.transmission_bound.values.data(),
              crlb->map.transmission_bound.values.size() * sizeof(double));
  std::memcpy(phase, crlb->map.phase_bound.values.data(),
              crlb->map.phase_bound.values.size() * sizeof(double));
  return PTYCHO_OK;
}

ptycho_status ptycho_crlb_rank(const ptycho_crlb* crlb, int32_t* rank) {
  if (ptycho_status s = require(crlb && rank, "null argument")) return s;
  *rank = crlb->map.rank;
  return PTYCHO_OK;
}

ptycho_status ptycho_crlb_save(const ptycho_crlb* crlb, const char* dir) {
  if (ptycho_status s = require(crlb && dir, "null argument")) return s;
  return guarded([&] { ptycho::save_crlb(dir, crlb->map); });
}

ptycho_status ptycho_crlb_load(const char* dir, const ptycho_scenario* scenario,
                               ptycho_crlb** out) {
  if (ptycho_status s = require(dir && out, "null argument")) return s;
  return guarded([&] {
    auto crlb = std::make_unique<ptycho_crlb>();
    crlb->map = ptycho::load_crlb(dir);
    if (scenario &&
        !crlb->map.transmission_bound.grid.same_shape(
            scenario->built.truth.grid()))
      ptycho::throw_invalid("loaded bound maps do not match the scenario grid");
    *out = crlb.release();
  });
}

void ptycho_crlb_free(ptycho_crlb* crlb) { delete crlb; }

ptycho_status ptycho_reconstruct(const ptycho_scenario* scenario,
                                 const ptycho_stack* observed,
                                 ptycho_algorithm algorithm,
                                 const ptycho_cg_options* options,
                                 const char* trace_csv_path,
                                 ptycho_estimate** out) {
  if (ptycho_status s = require(scenario && observed && out, "null argument"))
    return s;
  return guarded([&] {
    const ptycho::Algorithm algo = to_algorithm(algorithm);
    const ptycho::CgConfig cg = resolve_options(scenario, algo, options);
    ptycho::CgResult result =
        ptycho::run_cg(scenario->built.probe, scenario->built.scan,
                       observed->stack, algo, cg, scenario->built.truth);
    if (trace_csv_path) {
      std::ofstream trace(trace_csv_path);
      if (!trace) ptycho::throw_io(std::string("cannot write trace: ") +
                                   trace_csv_path);
      result.trace.write_csv(trace);
    }
    auto estimate = std::make_unique<ptycho_estimate>();
    estimate->estimate = std::move(result.estimate);
    *out = estimate.release();
  });
}

ptycho_status ptycho_estimate_get(const ptycho_estimate* estimate,
                                  double* transmission, double* phase) {
  if (ptycho_status s = require(estimate && transmission && phase, "null argument"))
    return s;
  std::memcpy(transmission, estimate->estimate.transmission.values.data(),
              estimate->estimate.transmission.values.size() * sizeof(double));
  std::memcpy(phase, estimate->estimate.phase.values.data(),
              estimate->estimate.phase.values.size() * sizeof(double));
  return PTYCHO_OK;
}

ptycho_status ptycho_estimate_save(const ptycho_estimate* estimate,
                                   const char* dir) {
  if (ptycho_status s = require(estimate && dir, "null argument")) return s;
  return guarded([&] { ptycho::save_estimate(dir, estimate->estimate); });
}

void ptycho_estimate_free(ptycho_estimate* estimate) { delete estimate; }

ptycho_status ptycho_run_campaign(const ptycho_scenario* scenario,
                                  ptycho_algorithm algorithm, int32_t trials,
                                  int32_t repeats, uint64_t master_seed,
                                  const ptycho_cg_options* options,
                                  ptycho_mc** out) {
  if (ptycho_status s = require(scenario && out, "null argument")) return s;
  return guarded([&] {
    const ptycho::Algorithm algo = to_algorithm(algorithm);
    const ptycho::CgConfig cg = resolve_options(scenario, algo, options);
    ptycho::CampaignConfig campaign;
    campaign.trials = trials;
    campaign.repeats = repeats;
    campaign.master_seed = master_seed;
    const std::vector<ptycho::ObjectEstimate> estimates =
        ptycho::run_campaign(scenario->built.probe, scenario->built.truth,
                             scenario->built.scan, algo, cg, campaign);
    auto mc = std::make_unique<ptycho_mc>();
    mc->stats = ptycho::statistics(estimates, scenario->built.truth);
    mc->config = scenario->config;
    mc->algorithm = algo;
    mc->trials = trials;
    mc->repeats = repeats;
    mc->master_seed = master_seed;
    *out = mc.release();
  });
}

ptycho_status ptycho_mc_get_map(const ptycho_mc* mc, ptycho_mc_map which,
                                double* out) {
  if (ptycho_status s = require(mc && out, "null argument")) return s;
  const ptycho::RealField* field = nullptr;
  switch (which) {
    case PTYCHO_MC_MEAN_A: field = &mc->stats.mean_transmission; break;
    case PTYCHO_MC_MEAN_PHI: field = &mc->stats.mean_phase; break;
    case PTYCHO_MC_VAR_A: field = &mc->stats.var_transmission; break;
    case PTYCHO_MC_VAR_PHI: field = &mc->stats.var_phase; break;
    case PTYCHO_MC_BIAS2_A: field = &mc->stats.bias2_transmission; break;
    case PTYCHO_MC_BIAS2_PHI: field = &mc->stats.bias2_phase; break;
  }
  if (ptycho_status s = require(field != nullptr, "unknown map selector"))
    return s;
  std::memcpy(out, field->values.data(), field->values.size() * sizeof(double));
  return PTYCHO_OK;
}

ptycho_status ptycho_mc_compare(const ptycho_mc* mc, const ptycho_crlb* crlb,
                                ptycho_mc_aggregates* out) {
  if (ptycho_status s = require(mc && crlb && out, "null argument")) return s;
  return guarded([&] {
    const ptycho::CrlbComparison cmp =
        ptycho::compare_to_crlb(mc->stats, crlb->map);
    out->var_sum_transmission = cmp.var_sum_transmission;
    out->var_sum_phase = cmp.var_sum_phase;
    out->crlb_sum_transmission = cmp.crlb_sum_transmission;
    out->crlb_sum_phase = cmp.crlb_sum_phase;
    out->ratio_transmission = cmp.ratio_transmission;
    out->ratio_phase = cmp.ratio_phase;
    out->bvr_transmission = cmp.bvr_transmission;
    out->bvr_phase = cmp.bvr_phase;
  });
}

ptycho_status ptycho_mc_save(const ptycho_mc* mc, const ptycho_crlb* crlb,
                             const char* dir) {
  if (ptycho_status s = require(mc && dir, "null argument")) return s;
  return guarded([&] {
    ptycho::save_statistics(dir, mc->stats);
    ptycho::write_campaign_manifest(dir, mc->config, mc->algorithm, mc->trials,
                                    mc->repeats, mc->master_seed);
    if (crlb) {
      ptycho::save_crlb(dir, crlb->map);
      const ptycho::CrlbComparison cmp =
          ptycho::compare_to_crlb(mc->stats, crlb->map);
      std::ostringstream csv;
      csv << ptycho::comparison_csv_header() << '\n'
          << ptycho::comparison_csv_row(mc->config.scenario, mc->algorithm,
                                        mc->repeats, mc->trials, cmp)
          << '\n';
      ptycho::write_text_file((fs::path(dir) / "aggregate.csv").string(),
                              csv.str());
    }
  });
}

ptycho_status ptycho_mc_load(const char* dir, const ptycho_scenario* scenario,
                             ptycho_mc** out) {
  if (ptycho_status s = require(dir && scenario && out, "null argument"))
    return s;
  return guarded([&] {
    auto mc = std::make_unique<ptycho_mc>();
    mc->stats = ptycho::load_statistics(dir);
    mc->config = scenario->config;
    nlohmann::json manifest = nlohmann::json::parse(
        ptycho::read_text_file((fs::path(dir) / "manifest.json").string()));
    mc->algorithm =
        ptycho::algorithm_from_name(manifest.value("algorithm", "ml"));
    mc->trials = manifest.value("trials", mc->stats.trials);
    mc->repeats = manifest.value("repeats", 1);
    mc->master_seed = manifest.value("master_seed", std::uint64_t{0});
    *out = mc.release();
  });
}

void ptycho_mc_free(ptycho_mc* mc) { delete mc; }

ptycho_status ptycho_campaign_csv_row(const char* campaign_dir, char* row,
                                      size_t row_size) {
  if (ptycho_status s = require(campaign_dir && row && row_size > 0,
                                "null argument"))
    return s;
  return guarded([&] {
    const ptycho::McStatistics stats = ptycho::load_statistics(campaign_dir);
    const ptycho::CrlbMap crlb = ptycho::load_crlb(campaign_dir);
    nlohmann::json manifest = nlohmann::json::parse(ptycho::read_text_file(
        (fs::path(campaign_dir) / "manifest.json").string()));
    ptycho::CaseSpec spec;
    spec.case_id = manifest.value("case", 0);
    spec.photon_number = manifest.value("photon_number", 0.0);
    const ptycho::Algorithm algo =
        ptycho::algorithm_from_name(manifest.value("algorithm", "ml"));
    const int repeats = manifest.value("repeats", 1);
    const int trials = manifest.value("trials", stats.trials);
    const ptycho::CrlbComparison cmp = ptycho::compare_to_crlb(stats, crlb);
    const std::string text =
        ptycho::comparison_csv_row(spec, algo, repeats, trials, cmp);
    if (text.size() + 1 > row_size)
      ptycho::throw_invalid("row buffer too small");
    std::memcpy(row, text.c_str(), text.size() + 1);
  });
}

const char* ptycho_campaign_csv_header(void) {
  static const std::string header = ptycho::comparison_csv_header();
  return header.c_str();
}

}  // extern "C"
