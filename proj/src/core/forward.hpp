#ifndef PTYCHO_FORWARD_HPP
#define PTYCHO_FORWARD_HPP

#include <vector>

#include "fields.hpp"

namespace ptycho {

/// The estimation target: transmission A >= 0 and phase phi (radians) on a
/// shared grid. The complex object is A * exp(i phi).
struct ObjectEstimate {
  RealField transmission;
  RealField phase;

  const Grid2D& grid() const { return transmission.grid; }
  void validate() const;
};

/// Illumination field on the probe grid. Zero outside the circular support of
/// radius `support_radius` (micrometers) centered on the grid. `photon_number`
/// is the total power sum |P|^2 (hbar*omega == 1 units).
struct Probe {
  ComplexField field;
  double support_radius = 0.0;
  double photon_number = 0.0;

  /// Support diameter in pixels; the step length L of the overlap formula.
  int support_diameter_px() const;
  /// Rescales the field so that sum |P|^2 == pn.
  void set_photon_number(double pn);
  void validate() const;
};

struct ScanOffset {
  int dx = 0;
  int dy = 0;
  bool operator==(const ScanOffset&) const = default;
};

/// Regular grid of integer pixel anchor positions for the probe window.
/// Anchors must lie inside the object grid; the window itself is read
/// periodically (the sampled world is DFT-periodic).
struct ScanPattern {
  std::vector<ScanOffset> offsets;
  double overlap_ratio = 0.0;
  int step_px = 0;
};

/// Per-position detector data: expected photon counts N_m and, once
/// measurements exist, observed counts n_m (integer-valued, or real after
/// averaging repeated measurements). All planes share the detector grid,
/// which coincides with the probe-frame DFT grid.
struct DiffractionStack {
  std::vector<RealField> expected;
  std::vector<RealField> observed;

  int positions() const { return static_cast<int>(expected.size()); }
  bool has_observed() const { return !observed.empty(); }
  const Grid2D& detector_grid() const { return expected.front().grid; }
  void validate_geometry() const;
};

/// Complex object patch A*exp(i phi) on the probe grid, windowed at the
/// anchor offset with periodic indexing. Throws a placement error when the
/// anchor lies outside the object grid.
ComplexField extract_patch(const ObjectEstimate& obj, ScanOffset offset,
                           const Grid2D& probe_grid);

/// Exit wave Psi_m = P .* patch on the probe grid.
ComplexField exit_wave(const Probe& probe, const ObjectEstimate& obj,
                       ScanOffset offset);

/// Far-field intensity |dft2(psi)|^2.
RealField intensity(const ComplexField& psi);

/// Expected photon counts N_m = intensity(exit_wave(m)) for every scan
/// position. Deterministic.
DiffractionStack expected_counts(const Probe& probe, const ObjectEstimate& obj,
                                 const ScanPattern& scan);

/// Regular rows x cols scan with step d = round((1 - overlap) * L), where L
/// is the probe support diameter in pixels. Offsets are (col*d, row*d).
ScanPattern make_scan(const Grid2D& object_grid, const Grid2D& probe_grid,
                      int n_rows, int n_cols, double overlap_ratio);

}  // namespace ptycho

#endif
