#include "scenario.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ptycho {

using nlohmann::json;

void CaseSpec::validate() const {
  if (case_id < 1 || case_id > 4) throw_config("case id must be 1..4");
  object_grid.validate();
  probe_grid.validate();
  if (!(support_radius > 0.0)) throw_config("support radius must be > 0");
  if (!(photon_number > 0.0)) throw_config("photon number must be > 0");
  if (scan_rows < 1 || scan_cols < 1) throw_config("scan grid must be >= 1x1");
  if (!(overlap_ratio > 0.0 && overlap_ratio < 1.0))
    throw_config("overlap ratio must lie in (0, 1)");
  if (transmission_low < 0.0) throw_config("transmission_low must be >= 0");
}

namespace {

// 5x7 bitmaps, row strings top to bottom.
const std::array<const char*, 7>& glyph_rows(char character) {
  static const std::array<const char*, 7> kP = {
      "11110", "10001", "10001", "11110", "10000", "10000", "10000"};
  static const std::array<const char*, 7> kA = {
      "01110", "10001", "10001", "11111", "10001", "10001", "10001"};
  static const std::array<const char*, 7> kT = {
      "11111", "00100", "00100", "00100", "00100", "00100", "00100"};
  switch (character) {
    case 'P': return kP;
    case 'A': return kA;
    case 'T': return kT;
    default: throw_invalid(std::string("unsupported glyph character '") +
                           character + "' (expected P, A or T)");
  }
}

}  // namespace

RealField rasterize_glyph(char character, const Grid2D& grid, double low,
                          double high) {
  grid.validate();
  const auto& rows = glyph_rows(character);
  RealField field(grid, low);

  // Cell size chosen so the 5x7 box sits inside the grid with a margin.
  const int cell = std::max(1, std::min(grid.nx / 7, grid.ny / 9));
  const int x0 = (grid.nx - 5 * cell) / 2;
  const int y0 = (grid.ny - 7 * cell) / 2;
  for (int ry = 0; ry < 7; ++ry)
    for (int rx = 0; rx < 5; ++rx) {
      if (rows[static_cast<size_t>(ry)][rx] != '1') continue;
      for (int dy = 0; dy < cell; ++dy)
        for (int dx = 0; dx < cell; ++dx) {
          const int x = x0 + rx * cell + dx;
          const int y = y0 + ry * cell + dy;
          if (x < 0 || y < 0 || x >= grid.nx || y >= grid.ny) continue;
          field.at(x, y) = high;
        }
    }
  return field;
}

namespace {

RealField circular_mask(const Grid2D& grid, double radius_px) {
  RealField mask(grid);
  const double cx = 0.5 * (grid.nx - 1);
  const double cy = 0.5 * (grid.ny - 1);
  for (int y = 0; y < grid.ny; ++y)
    for (int x = 0; x < grid.nx; ++x)
      mask.at(x, y) = (std::hypot(x - cx, y - cy) <= radius_px) ? 1.0 : 0.0;
  return mask;
}

}  // namespace

Scenario build_case(const CaseSpec& spec) {
  spec.validate();
  Scenario sc;
  sc.spec = spec;

  // Object truth.
  sc.truth.transmission = RealField(spec.object_grid, 1.0);
  sc.truth.phase = RealField(spec.object_grid, 0.0);
  if (spec.case_id == 3)
    sc.truth.transmission =
        rasterize_glyph('A', spec.object_grid, spec.transmission_low, 1.0);
  if (spec.case_id == 4)
    sc.truth.phase =
        rasterize_glyph('T', spec.object_grid, 0.0, spec.glyph_phase_high);

  // Probe: amplitude pattern truncated by the circular support, then scaled
  // to the requested photon number.
  const double radius_px = spec.support_radius / spec.probe_grid.spacing;
  const RealField mask = circular_mask(spec.probe_grid, radius_px);
  RealField amplitude = mask;
  RealField phase(spec.probe_grid, 0.0);
  if (spec.case_id == 1 || spec.case_id == 2)
    phase = rasterize_glyph('P', spec.probe_grid, 0.0, spec.glyph_phase_high);
  if (spec.case_id == 2) {
    const RealField shape = rasterize_glyph('P', spec.probe_grid, 0.0, 1.0);
    for (size_t i = 0; i < amplitude.values.size(); ++i)
      amplitude.values[i] *= shape.values[i];
  }

  sc.probe.field = ComplexField(spec.probe_grid);
  for (size_t i = 0; i < amplitude.values.size(); ++i)
    sc.probe.field.values[i] =
        amplitude.values[i] * std::polar(1.0, phase.values[i] * mask.values[i]);
  sc.probe.support_radius = spec.support_radius;
  sc.probe.set_photon_number(spec.photon_number);
  sc.probe.validate();

  sc.scan = make_scan(spec.object_grid, spec.probe_grid, spec.scan_rows,
                      spec.scan_cols, spec.overlap_ratio);
  return sc;
}

namespace {

Grid2D grid_from_json(const json& j, double default_spacing) {
  Grid2D g;
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  g.spacing = j.value("spacing_um", default_spacing);
  return g;
}

}  // namespace

ConfigFile parse_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_config(std::string("invalid config JSON: ") + e.what());
  }
  try {
    ConfigFile cfg;
    CaseSpec& s = cfg.scenario;
    s.case_id = j.at("case").get<int>();
    s.object_grid = grid_from_json(j.at("object"), 1.0);
    s.probe_grid = grid_from_json(j.at("probe"), s.object_grid.spacing);
    s.support_radius = j.at("probe").at("support_radius_um").get<double>();
    if (j.contains("wavelength_nm"))
      s.wavelength = j.at("wavelength_nm").get<double>() * 1e-3;
    s.photon_number = j.at("photon_number").get<double>();
    if (j.contains("scan")) {
      const json& scan = j.at("scan");
      s.scan_rows = scan.value("rows", 2);
      s.scan_cols = scan.value("cols", 2);
      s.overlap_ratio = scan.value("overlap_ratio", 0.7);
    }
    s.transmission_low = j.value("transmission_low", 0.1);
    s.glyph_phase_high = j.value("glyph_phase_high", 1.0);
    s.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("fisher_rel_tol"))
      cfg.fisher_rel_tol = j.at("fisher_rel_tol").get<double>();
    if (j.contains("optimizer")) {
      const json& opt = j.at("optimizer");
      if (opt.contains("max_iterations"))
        cfg.cg_max_iterations = opt.at("max_iterations").get<int>();
      if (opt.contains("gamma_initial"))
        cfg.cg_gamma_initial = opt.at("gamma_initial").get<double>();
      if (opt.contains("gamma_after"))
        cfg.cg_gamma_after = opt.at("gamma_after").get<double>();
      if (opt.contains("gamma_switch_iteration"))
        cfg.cg_gamma_switch_iteration = opt.at("gamma_switch_iteration").get<int>();
      if (opt.contains("alpha_probes"))
        cfg.cg_alpha_probes = opt.at("alpha_probes").get<std::vector<double>>();
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
    if (j.contains("algorithm"))
      cfg.algorithm = j.at("algorithm").get<std::string>();

    cfg.scenario.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw_config(std::string("config schema error: ") + e.what());
  }
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

CgConfig resolve_cg_config(const ConfigFile& config, Algorithm algorithm) {
  CgConfig cg = CgConfig::defaults(algorithm);
  if (config.cg_max_iterations) cg.max_iterations = *config.cg_max_iterations;
  if (config.cg_gamma_initial) cg.gamma_initial = *config.cg_gamma_initial;
  if (config.cg_gamma_after) cg.gamma_after = *config.cg_gamma_after;
  if (config.cg_gamma_switch_iteration)
    cg.gamma_switch_iteration = *config.cg_gamma_switch_iteration;
  if (config.cg_alpha_probes) cg.alpha_probes = *config.cg_alpha_probes;
  cg.validate();
  return cg;
}

std::string config_to_json(const ConfigFile& config) {
  const CaseSpec& s = config.scenario;
  json j;
  j["case"] = s.case_id;
  j["object"] = {{"nx", s.object_grid.nx},
                 {"ny", s.object_grid.ny},
                 {"spacing_um", s.object_grid.spacing}};
  j["probe"] = {{"nx", s.probe_grid.nx},
                {"ny", s.probe_grid.ny},
                {"spacing_um", s.probe_grid.spacing},
                {"support_radius_um", s.support_radius}};
  j["wavelength_nm"] = s.wavelength * 1e3;
  j["photon_number"] = s.photon_number;
  j["scan"] = {{"rows", s.scan_rows},
               {"cols", s.scan_cols},
               {"overlap_ratio", s.overlap_ratio}};
  j["transmission_low"] = s.transmission_low;
  j["glyph_phase_high"] = s.glyph_phase_high;
  j["seed"] = s.seed;
  if (config.fisher_rel_tol) j["fisher_rel_tol"] = *config.fisher_rel_tol;
  json opt;
  if (config.cg_max_iterations) opt["max_iterations"] = *config.cg_max_iterations;
  if (config.cg_gamma_initial) opt["gamma_initial"] = *config.cg_gamma_initial;
  if (config.cg_gamma_after) opt["gamma_after"] = *config.cg_gamma_after;
  if (config.cg_gamma_switch_iteration)
    opt["gamma_switch_iteration"] = *config.cg_gamma_switch_iteration;
  if (config.cg_alpha_probes) opt["alpha_probes"] = *config.cg_alpha_probes;
  if (!opt.empty()) j["optimizer"] = opt;
  if (config.trials) j["trials"] = *config.trials;
  if (config.repeats) j["repeats"] = *config.repeats;
  if (config.algorithm) j["algorithm"] = *config.algorithm;
  return j.dump(2);
}

std::string config_hash(const ConfigFile& config) {
  const std::string text = config_to_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace ptycho
