#ifndef PTYCHO_FIELDS_HPP
#define PTYCHO_FIELDS_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace ptycho {

using cdouble = std::complex<double>;

/// Uniform 2D sampling grid. `spacing` is the pixel pitch in micrometers;
/// it is bookkeeping only, all transforms work in index space.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;

  int pixel_count() const { return nx * ny; }
  int index(int x, int y) const { return y * nx + x; }

  bool same_shape(const Grid2D& other) const {
    return nx == other.nx && ny == other.ny;
  }
  bool operator==(const Grid2D& other) const {
    return nx == other.nx && ny == other.ny && spacing == other.spacing;
  }

  void validate() const {
    if (nx < 1 || ny < 1) throw_invalid("grid dimensions must be >= 1");
    if (!(spacing > 0.0)) throw_invalid("grid spacing must be > 0");
  }
};

/// Real scalar field sampled on a Grid2D, row-major storage.
struct RealField {
  Grid2D grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const Grid2D& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.pixel_count()), fill) {}

  double& at(int x, int y) { return values[static_cast<size_t>(grid.index(x, y))]; }
  double at(int x, int y) const { return values[static_cast<size_t>(grid.index(x, y))]; }
  int size() const { return grid.pixel_count(); }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Complex amplitude field sampled on a Grid2D, row-major storage.
struct ComplexField {
  Grid2D grid;
  std::vector<cdouble> values;

  ComplexField() = default;
  explicit ComplexField(const Grid2D& g, cdouble fill = {})
      : grid(g), values(static_cast<size_t>(g.pixel_count()), fill) {}

  cdouble& at(int x, int y) { return values[static_cast<size_t>(grid.index(x, y))]; }
  cdouble at(int x, int y) const { return values[static_cast<size_t>(grid.index(x, y))]; }
  int size() const { return grid.pixel_count(); }

  bool all_finite() const {
    for (const cdouble& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

inline double power(const ComplexField& f) {
  double s = 0.0;
  for (const cdouble& v : f.values) s += std::norm(v);
  return s;
}

inline double l2_norm_sq(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return s;
}

inline double dot(const RealField& a, const RealField& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

}  // namespace ptycho

#endif
