#include "forward.hpp"

#include <cmath>
#include <string>

#include "fft.hpp"

namespace ptycho {

void ObjectEstimate::validate() const {
  transmission.grid.validate();
  if (!(transmission.grid == phase.grid))
    throw_invalid("transmission and phase must share one grid");
  if (!transmission.all_finite() || !phase.all_finite())
    throw_invalid("object fields must be finite");
  for (double a : transmission.values)
    if (a < 0.0) throw_invalid("transmission must be >= 0 everywhere");
}

int Probe::support_diameter_px() const {
  return static_cast<int>(std::lround(2.0 * support_radius / field.grid.spacing));
}

void Probe::set_photon_number(double pn) {
  if (!(pn > 0.0)) throw_invalid("photon number must be > 0");
  const double current = power(field);
  if (!(current > 0.0)) throw_invalid("cannot normalize a zero probe");
  const double scale = std::sqrt(pn / current);
  for (cdouble& v : field.values) v *= scale;
  photon_number = pn;
}

void Probe::validate() const {
  field.grid.validate();
  if (!field.all_finite()) throw_invalid("probe field must be finite");
  // Support constraint: strictly outside |r| <= r0 the field is zero.
  const double cx = 0.5 * (field.grid.nx - 1);
  const double cy = 0.5 * (field.grid.ny - 1);
  const double r0 = support_radius / field.grid.spacing;
  for (int y = 0; y < field.grid.ny; ++y)
    for (int x = 0; x < field.grid.nx; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      if (r > r0 && std::norm(field.at(x, y)) != 0.0)
        throw_invalid("probe field is nonzero outside its circular support");
    }
}

void DiffractionStack::validate_geometry() const {
  if (expected.empty()) throw_invalid("empty diffraction stack");
  const Grid2D& g = expected.front().grid;
  for (const RealField& f : expected)
    if (!f.grid.same_shape(g)) throw_invalid("stack planes must share the detector grid");
  if (!observed.empty() && observed.size() != expected.size())
    throw_invalid("observed planes must match expected planes");
  for (const RealField& f : observed)
    if (!f.grid.same_shape(g)) throw_invalid("stack planes must share the detector grid");
}

namespace {

int wrap(int v, int n) {
  v %= n;
  return v < 0 ? v + n : v;
}

void check_anchor(const Grid2D& object_grid, ScanOffset offset) {
  if (offset.dx < 0 || offset.dy < 0 || offset.dx >= object_grid.nx ||
      offset.dy >= object_grid.ny)
    throw_invalid("probe placement (" + std::to_string(offset.dx) + "," +
                  std::to_string(offset.dy) + ") lies outside the object grid");
}

}  // namespace

ComplexField extract_patch(const ObjectEstimate& obj, ScanOffset offset,
                           const Grid2D& probe_grid) {
  probe_grid.validate();
  const Grid2D& og = obj.grid();
  check_anchor(og, offset);
  ComplexField patch(probe_grid);
  for (int v = 0; v < probe_grid.ny; ++v) {
    const int gy = wrap(offset.dy + v, og.ny);
    for (int u = 0; u < probe_grid.nx; ++u) {
      const int gx = wrap(offset.dx + u, og.nx);
      // Written out (not std::polar) so transiently negative optimizer
      // iterates of A stay well-defined.
      const double a = obj.transmission.at(gx, gy);
      const double phi = obj.phase.at(gx, gy);
      patch.at(u, v) = cdouble(a * std::cos(phi), a * std::sin(phi));
    }
  }
  return patch;
}

ComplexField exit_wave(const Probe& probe, const ObjectEstimate& obj,
                       ScanOffset offset) {
  ComplexField psi = extract_patch(obj, offset, probe.field.grid);
  for (size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= probe.field.values[i];
  return psi;
}

RealField intensity(const ComplexField& psi) {
  ComplexField spectrum = dft2(psi);
  RealField out(psi.grid);
  for (size_t i = 0; i < spectrum.values.size(); ++i)
    out.values[i] = std::norm(spectrum.values[i]);
  return out;
}

DiffractionStack expected_counts(const Probe& probe, const ObjectEstimate& obj,
                                 const ScanPattern& scan) {
  if (scan.offsets.empty()) throw_invalid("scan pattern has no positions");
  DiffractionStack stack;
  stack.expected.reserve(scan.offsets.size());
  for (ScanOffset offset : scan.offsets)
    stack.expected.push_back(intensity(exit_wave(probe, obj, offset)));
  return stack;
}

ScanPattern make_scan(const Grid2D& object_grid, const Grid2D& probe_grid,
                      int n_rows, int n_cols, double overlap_ratio) {
  object_grid.validate();
  probe_grid.validate();
  if (n_rows < 1 || n_cols < 1) throw_invalid("scan grid must be at least 1x1");
  if (!(overlap_ratio > 0.0 && overlap_ratio < 1.0))
    throw_invalid("overlap ratio must lie in (0, 1)");

  const int support_diameter = std::min(probe_grid.nx, probe_grid.ny);
  const int step = static_cast<int>(std::lround((1.0 - overlap_ratio) * support_diameter));
  if (step < 1 || step >= support_diameter)
    throw_invalid("degenerate scan step d=" + std::to_string(step) +
                  " for overlap ratio " + std::to_string(overlap_ratio));

  ScanPattern scan;
  scan.overlap_ratio = overlap_ratio;
  scan.step_px = step;
  scan.offsets.reserve(static_cast<size_t>(n_rows) * n_cols);
  for (int r = 0; r < n_rows; ++r)
    for (int c = 0; c < n_cols; ++c) {
      ScanOffset offset{c * step, r * step};
      check_anchor(object_grid, offset);
      scan.offsets.push_back(offset);
    }
  return scan;
}

}  // namespace ptycho
