#ifndef PTYCHO_SCENARIO_HPP
#define PTYCHO_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "forward.hpp"
#include "optimizer.hpp"

namespace ptycho {

/// Parameters of one of the four built-in simulation cases:
///   1: uniform object, uniform-power probe with character-shaped phase
///   2: uniform object, character-shaped probe power and phase
///   3: character-shaped transmission (min transmission_low), flat probe
///   4: character-shaped phase, flat probe
struct CaseSpec {
  int case_id = 1;
  Grid2D object_grid{70, 70, 1.0};
  Grid2D probe_grid{60, 60, 1.0};
  double support_radius = 30.0;    // micrometers
  double wavelength = 0.03;        // micrometers; metadata only
  double photon_number = 1e9;
  int scan_rows = 2;
  int scan_cols = 2;
  double overlap_ratio = 0.7;
  double transmission_low = 0.1;   // low transmission value for case 3
  double glyph_phase_high = 1.0;   // radians for character-shaped phases
  std::uint64_t seed = 0;

  void validate() const;
};

/// Binary character mask from a built-in 5x7 bitmap font ('P', 'A', 'T'),
/// nearest-neighbor upscaled and centered on the target grid. Values are
/// exactly `low` outside the character and `high` inside.
RealField rasterize_glyph(char character, const Grid2D& grid, double low,
                          double high);

struct Scenario {
  CaseSpec spec;
  ObjectEstimate truth;
  Probe probe;
  ScanPattern scan;
};

Scenario build_case(const CaseSpec& spec);

/// Optional optimizer/campaign settings carried by a config file.
struct ConfigFile {
  CaseSpec scenario;
  std::optional<double> fisher_rel_tol;
  std::optional<int> cg_max_iterations;
  std::optional<double> cg_gamma_initial;
  std::optional<double> cg_gamma_after;
  std::optional<int> cg_gamma_switch_iteration;
  std::optional<std::vector<double>> cg_alpha_probes;
  std::optional<int> trials;
  std::optional<int> repeats;
  std::optional<std::string> algorithm;
};

ConfigFile load_config_file(const std::string& path);
ConfigFile parse_config_json(const std::string& json_text);

/// Applies the config's optimizer overrides on top of the per-algorithm
/// defaults.
CgConfig resolve_cg_config(const ConfigFile& config, Algorithm algorithm);

/// FNV-1a hash of the canonical config serialization; recorded in manifests.
std::string config_hash(const ConfigFile& config);

std::string config_to_json(const ConfigFile& config);

}  // namespace ptycho

#endif
