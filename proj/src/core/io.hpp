#ifndef PTYCHO_IO_HPP
#define PTYCHO_IO_HPP

#include <string>

#include "fisher.hpp"
#include "montecarlo.hpp"
#include "scenario.hpp"

namespace ptycho {

/// Fields are stored as raw little-endian float64 (row-major; real/imag
/// interleaved for complex data) next to a JSON sidecar carrying
/// {nx, ny, spacing, dtype, role} plus caller metadata. `path_base` gets the
/// extensions ".bin" and ".json".
void write_real_field(const std::string& path_base, const RealField& field,
                      const std::string& role,
                      const std::string& extra_json = "");
void write_complex_field(const std::string& path_base, const ComplexField& field,
                         const std::string& role,
                         const std::string& extra_json = "");
RealField read_real_field(const std::string& path_base,
                          std::string* role = nullptr);
ComplexField read_complex_field(const std::string& path_base,
                                std::string* role = nullptr);

/// Stack planes are written one file pair per position:
/// <dir>/<kind>_m<index>.{bin,json}; sidecars carry {m, trial, seed}.
void save_stack(const std::string& dir, const DiffractionStack& stack,
                std::uint64_t master_seed, std::uint64_t trial);
DiffractionStack load_stack(const std::string& dir);

void save_crlb(const std::string& dir, const CrlbMap& crlb);
CrlbMap load_crlb(const std::string& dir);

void save_estimate(const std::string& dir, const ObjectEstimate& estimate);
ObjectEstimate load_estimate(const std::string& dir);

void save_statistics(const std::string& dir, const McStatistics& stats);
McStatistics load_statistics(const std::string& dir);

/// One aggregate CSV row per campaign, keyed by scenario and algorithm.
/// Columns: case,algorithm,PN,T_repeats,trials,var_A,var_phi,crlb_A,
/// crlb_phi,bvr_A,bvr_phi,ratio_A,ratio_phi
std::string comparison_csv_header();
std::string comparison_csv_row(const CaseSpec& spec, Algorithm algorithm,
                               int repeats, int trials,
                               const CrlbComparison& comparison);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Campaign manifest: configuration hash, seeds and run parameters.
void write_campaign_manifest(const std::string& dir, const ConfigFile& config,
                             Algorithm algorithm, int trials, int repeats,
                             std::uint64_t master_seed);

}  // namespace ptycho

#endif
