#include "io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace ptycho {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_bytes(const std::string& path, const void* data, size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot open for writing: " + path);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw_io("short write: " + path);
}

std::vector<double> read_doubles(const std::string& path, size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open for reading: " + path);
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw_io("short read: " + path);
  return data;
}

json sidecar(const Grid2D& grid, const std::string& dtype,
             const std::string& role, const std::string& extra_json) {
  json j;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["spacing"] = grid.spacing;
  j["dtype"] = dtype;
  j["role"] = role;
  j["byte_order"] = "little";
  if (!extra_json.empty()) {
    try {
      j["meta"] = json::parse(extra_json);
    } catch (const json::exception& e) {
      throw_invalid(std::string("bad sidecar metadata JSON: ") + e.what());
    }
  }
  return j;
}

json load_sidecar(const std::string& path_base, Grid2D* grid,
                  std::string* dtype, std::string* role) {
  std::ifstream in(path_base + ".json");
  if (!in) throw_io("cannot open sidecar: " + path_base + ".json");
  json j;
  try {
    in >> j;
    grid->nx = j.at("nx").get<int>();
    grid->ny = j.at("ny").get<int>();
    grid->spacing = j.at("spacing").get<double>();
    *dtype = j.at("dtype").get<std::string>();
    if (role) *role = j.value("role", "");
  } catch (const json::exception& e) {
    throw_io(std::string("bad sidecar: ") + e.what());
  }
  grid->validate();
  return j;
}

}  // namespace

void write_real_field(const std::string& path_base, const RealField& field,
                      const std::string& role, const std::string& extra_json) {
  write_bytes(path_base + ".bin", field.values.data(),
              field.values.size() * sizeof(double));
  write_text_file(path_base + ".json",
                  sidecar(field.grid, "float64", role, extra_json).dump(2));
}

void write_complex_field(const std::string& path_base, const ComplexField& field,
                         const std::string& role, const std::string& extra_json) {
  write_bytes(path_base + ".bin", field.values.data(),
              field.values.size() * sizeof(cdouble));
  write_text_file(path_base + ".json",
                  sidecar(field.grid, "complex128", role, extra_json).dump(2));
}

RealField read_real_field(const std::string& path_base, std::string* role) {
  Grid2D grid;
  std::string dtype;
  load_sidecar(path_base, &grid, &dtype, role);
  if (dtype != "float64") throw_io("expected float64 field: " + path_base);
  RealField field(grid);
  field.values = read_doubles(path_base + ".bin",
                              static_cast<size_t>(grid.pixel_count()));
  return field;
}

ComplexField read_complex_field(const std::string& path_base, std::string* role) {
  Grid2D grid;
  std::string dtype;
  load_sidecar(path_base, &grid, &dtype, role);
  if (dtype != "complex128") throw_io("expected complex128 field: " + path_base);
  const auto raw = read_doubles(path_base + ".bin",
                                2 * static_cast<size_t>(grid.pixel_count()));
  ComplexField field(grid);
  for (size_t i = 0; i < field.values.size(); ++i)
    field.values[i] = cdouble(raw[2 * i], raw[2 * i + 1]);
  return field;
}

namespace {

std::string plane_base(const std::string& dir, const std::string& kind, int m) {
  std::ostringstream name;
  name << kind << "_m" << std::setfill('0') << std::setw(3) << m;
  return (fs::path(dir) / name.str()).string();
}

void save_planes(const std::string& dir, const std::vector<RealField>& planes,
                 const std::string& kind, std::uint64_t master_seed,
                 std::uint64_t trial) {
  for (size_t m = 0; m < planes.size(); ++m) {
    json meta;
    meta["m"] = m;
    meta["trial"] = trial;
    meta["seed"] = master_seed;
    write_real_field(plane_base(dir, kind, static_cast<int>(m)), planes[m],
                     kind, meta.dump());
  }
}

std::vector<RealField> load_planes(const std::string& dir,
                                   const std::string& kind) {
  std::vector<RealField> planes;
  for (int m = 0;; ++m) {
    const std::string base = plane_base(dir, kind, m);
    if (!fs::exists(base + ".json")) break;
    planes.push_back(read_real_field(base));
  }
  return planes;
}

}  // namespace

void save_stack(const std::string& dir, const DiffractionStack& stack,
                std::uint64_t master_seed, std::uint64_t trial) {
  fs::create_directories(dir);
  save_planes(dir, stack.expected, "expected", master_seed, trial);
  if (stack.has_observed())
    save_planes(dir, stack.observed, "observed", master_seed, trial);
}

DiffractionStack load_stack(const std::string& dir) {
  DiffractionStack stack;
  stack.expected = load_planes(dir, "expected");
  stack.observed = load_planes(dir, "observed");
  if (stack.expected.empty() && !stack.observed.empty()) {
    // A reconstruction input may carry measurements only; geometry checks
    // still need expected planes, so mirror the observed shapes with zeros.
    for (const RealField& plane : stack.observed)
      stack.expected.emplace_back(plane.grid);
  }
  if (stack.expected.empty()) throw_io("no stack planes under " + dir);
  stack.validate_geometry();
  return stack;
}

void save_crlb(const std::string& dir, const CrlbMap& crlb) {
  fs::create_directories(dir);
  json meta;
  meta["rank"] = crlb.rank;
  meta["tolerance"] = crlb.tolerance;
  write_real_field((fs::path(dir) / "crlb_A").string(), crlb.transmission_bound,
                   "crlb_A", meta.dump());
  write_real_field((fs::path(dir) / "crlb_phi").string(), crlb.phase_bound,
                   "crlb_phi", meta.dump());
}

CrlbMap load_crlb(const std::string& dir) {
  CrlbMap crlb;
  crlb.transmission_bound = read_real_field((fs::path(dir) / "crlb_A").string());
  crlb.phase_bound = read_real_field((fs::path(dir) / "crlb_phi").string());
  std::ifstream in((fs::path(dir) / "crlb_A.json").string());
  json j;
  in >> j;
  if (j.contains("meta")) {
    crlb.rank = j["meta"].value("rank", 0);
    crlb.tolerance = j["meta"].value("tolerance", 0.0);
  }
  return crlb;
}

void save_estimate(const std::string& dir, const ObjectEstimate& estimate) {
  fs::create_directories(dir);
  write_real_field((fs::path(dir) / "estimate_A").string(),
                   estimate.transmission, "estimate_A");
  write_real_field((fs::path(dir) / "estimate_phi").string(), estimate.phase,
                   "estimate_phi");
}

ObjectEstimate load_estimate(const std::string& dir) {
  ObjectEstimate est;
  est.transmission = read_real_field((fs::path(dir) / "estimate_A").string());
  est.phase = read_real_field((fs::path(dir) / "estimate_phi").string());
  return est;
}

void save_statistics(const std::string& dir, const McStatistics& stats) {
  fs::create_directories(dir);
  json meta;
  meta["trials"] = stats.trials;
  meta["bvr_A"] = stats.bvr_transmission;
  meta["bvr_phi"] = stats.bvr_phase;
  const std::string m = meta.dump();
  const auto base = [&](const char* name) {
    return (fs::path(dir) / name).string();
  };
  write_real_field(base("mean_A"), stats.mean_transmission, "mean_A", m);
  write_real_field(base("mean_phi"), stats.mean_phase, "mean_phi", m);
  write_real_field(base("var_A"), stats.var_transmission, "var_A", m);
  write_real_field(base("var_phi"), stats.var_phase, "var_phi", m);
  write_real_field(base("bias2_A"), stats.bias2_transmission, "bias2_A", m);
  write_real_field(base("bias2_phi"), stats.bias2_phase, "bias2_phi", m);
}

McStatistics load_statistics(const std::string& dir) {
  McStatistics stats;
  const auto base = [&](const char* name) {
    return (fs::path(dir) / name).string();
  };
  stats.mean_transmission = read_real_field(base("mean_A"));
  stats.mean_phase = read_real_field(base("mean_phi"));
  stats.var_transmission = read_real_field(base("var_A"));
  stats.var_phase = read_real_field(base("var_phi"));
  stats.bias2_transmission = read_real_field(base("bias2_A"));
  stats.bias2_phase = read_real_field(base("bias2_phi"));
  std::ifstream in(base("mean_A") + std::string(".json"));
  json j;
  in >> j;
  if (j.contains("meta")) {
    stats.trials = j["meta"].value("trials", 0);
    stats.bvr_transmission = j["meta"].value("bvr_A", 0.0);
    stats.bvr_phase = j["meta"].value("bvr_phi", 0.0);
  }
  return stats;
}

std::string comparison_csv_header() {
  return "case,algorithm,PN,T_repeats,trials,var_A,var_phi,crlb_A,crlb_phi,"
         "bvr_A,bvr_phi,ratio_A,ratio_phi";
}

std::string comparison_csv_row(const CaseSpec& spec, Algorithm algorithm,
                               int repeats, int trials,
                               const CrlbComparison& comparison) {
  std::ostringstream row;
  row.precision(17);
  row << spec.case_id << ',' << algorithm_name(algorithm) << ','
      << spec.photon_number << ',' << repeats << ',' << trials << ','
      << comparison.var_sum_transmission << ',' << comparison.var_sum_phase
      << ',' << comparison.crlb_sum_transmission << ','
      << comparison.crlb_sum_phase << ',' << comparison.bvr_transmission << ','
      << comparison.bvr_phase << ',' << comparison.ratio_transmission << ','
      << comparison.ratio_phase;
  return row.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw_io("cannot open for writing: " + path);
  out << content;
  if (!out) throw_io("short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_campaign_manifest(const std::string& dir, const ConfigFile& config,
                             Algorithm algorithm, int trials, int repeats,
                             std::uint64_t master_seed) {
  fs::create_directories(dir);
  json j;
  j["config_hash"] = config_hash(config);
  j["case"] = config.scenario.case_id;
  j["algorithm"] = algorithm_name(algorithm);
  j["photon_number"] = config.scenario.photon_number;
  j["trials"] = trials;
  j["repeats"] = repeats;
  j["master_seed"] = master_seed;
  // Poisson stream labels are (master_seed, trial * repeats + repeat).
  j["stream_rule"] = "trial*repeats+repeat";
  write_text_file((fs::path(dir) / "manifest.json").string(), j.dump(2));
}

}  // namespace ptycho
