#include "objectives.hpp"

#include <cmath>

#include "fft.hpp"

namespace ptycho {
namespace {

int wrap(int v, int n) {
  v %= n;
  return v < 0 ? v + n : v;
}

void check_inputs(const ObjectEstimate& obj, const ScanPattern& scan,
                  const DiffractionStack& counts, double gamma) {
  if (!counts.has_observed()) throw_invalid("objective requires observed counts");
  if (counts.observed.size() != scan.offsets.size())
    throw_invalid("counts do not match the scan pattern");
  if (gamma < 0.0) throw_invalid("gamma must be >= 0");
  (void)obj;
}

// Shared gradient skeleton for both objectives: the weight w(n, N) enters as
//   g_A(r)   = -2 N_pix sum_m Re{ conj(P) e^{-i phi} idft2[ w . F(psi_m) ] }(r)
//   g_phi(r) = -2 N_pix sum_m A(r) Im{ same }(r)
// accumulated through the periodic window map. The 2*N_pix front factor makes
// these the exact derivatives of the discrete objectives.
template <typename WeightFn>
Gradient accumulate_gradient(const ObjectEstimate& obj, const Probe& probe,
                             const ScanPattern& scan,
                             const DiffractionStack& counts, WeightFn weight) {
  const Grid2D& og = obj.grid();
  const Grid2D& pg = probe.field.grid;
  const int n_pix = pg.pixel_count();

  Gradient grad;
  grad.wrt_transmission = RealField(og);
  grad.wrt_phase = RealField(og);

  ComplexField spectrum(pg);
  ComplexField weighted(pg);
  ComplexField back(pg);

  for (size_t m = 0; m < scan.offsets.size(); ++m) {
    const ScanOffset offset = scan.offsets[m];
    const ComplexField psi = exit_wave(probe, obj, offset);
    fft2_forward_raw(pg.nx, pg.ny, psi.values.data(), spectrum.values.data());

    const RealField& n_plane = counts.observed[m];
    if (!n_plane.grid.same_shape(pg)) throw_invalid("counts grid mismatch");
    for (int i = 0; i < n_pix; ++i) {
      const double n = n_plane.values[static_cast<size_t>(i)];
      const double big_n = std::norm(spectrum.values[static_cast<size_t>(i)]);
      weighted.values[static_cast<size_t>(i)] =
          weight(n, big_n) * spectrum.values[static_cast<size_t>(i)];
    }
    fft2_backward_raw(pg.nx, pg.ny, weighted.values.data(), back.values.data());
    // fft2_backward_raw is unnormalized, so `back` is already N_pix * idft2.

    for (int v = 0; v < pg.ny; ++v) {
      const int gy = wrap(offset.dy + v, og.ny);
      for (int u = 0; u < pg.nx; ++u) {
        const cdouble p = probe.field.at(u, v);
        if (p == cdouble{}) continue;
        const int gx = wrap(offset.dx + u, og.nx);
        const size_t gi = static_cast<size_t>(og.index(gx, gy));
        const cdouble z = std::conj(p) *
                          std::polar(1.0, -obj.phase.values[gi]) * back.at(u, v);
        grad.wrt_transmission.values[gi] += -2.0 * z.real();
        grad.wrt_phase.values[gi] += -2.0 * obj.transmission.values[gi] * z.imag();
      }
    }
  }
  return grad;
}

}  // namespace

ObjectiveValue neg_log_likelihood(const ObjectEstimate& obj, const Probe& probe,
                                  const ScanPattern& scan,
                                  const DiffractionStack& counts, double gamma) {
  check_inputs(obj, scan, counts, gamma);
  double total = 0.0;
  for (size_t m = 0; m < scan.offsets.size(); ++m) {
    const RealField plane = intensity(exit_wave(probe, obj, scan.offsets[m]));
    const RealField& n_plane = counts.observed[m];
    for (size_t i = 0; i < plane.values.size(); ++i) {
      const double n = n_plane.values[i];
      const double big_n = plane.values[i];
      const double log_term = (n > 0.0) ? n * std::log(big_n + gamma) : 0.0;
      total -= log_term - big_n;
    }
  }
  return {total, gamma};
}

ObjectiveValue amplitude_cost(const ObjectEstimate& obj, const Probe& probe,
                              const ScanPattern& scan,
                              const DiffractionStack& counts) {
  check_inputs(obj, scan, counts, 0.0);
  double total = 0.0;
  for (size_t m = 0; m < scan.offsets.size(); ++m) {
    const RealField plane = intensity(exit_wave(probe, obj, scan.offsets[m]));
    const RealField& n_plane = counts.observed[m];
    for (size_t i = 0; i < plane.values.size(); ++i) {
      const double diff =
          std::sqrt(n_plane.values[i]) - std::sqrt(plane.values[i]);
      total += diff * diff;
    }
  }
  return {total, 0.0};
}

Gradient grad_neg_log_likelihood(const ObjectEstimate& obj, const Probe& probe,
                                 const ScanPattern& scan,
                                 const DiffractionStack& counts, double gamma) {
  check_inputs(obj, scan, counts, gamma);
  return accumulate_gradient(obj, probe, scan, counts,
                             [gamma](double n, double big_n) {
                               // big_n + gamma == 0 forces F(psi) == 0 there,
                               // so the weighted spectrum vanishes; return 0
                               // instead of inf to keep 0 * inf out.
                               if (big_n + gamma == 0.0) return 0.0;
                               return n / (big_n + gamma) - 1.0;
                             });
}

Gradient grad_amplitude_cost(const ObjectEstimate& obj, const Probe& probe,
                             const ScanPattern& scan,
                             const DiffractionStack& counts, double gamma) {
  check_inputs(obj, scan, counts, gamma);
  return accumulate_gradient(obj, probe, scan, counts,
                             [gamma](double n, double big_n) {
                               if (big_n + gamma == 0.0) return 0.0;
                               return std::sqrt(n) / std::sqrt(big_n + gamma) - 1.0;
                             });
}

double dropped_likelihood_constant(const DiffractionStack& counts) {
  if (!counts.has_observed()) throw_invalid("requires observed counts");
  double total = 0.0;
  for (const RealField& plane : counts.observed)
    for (double n : plane.values) total += std::lgamma(n + 1.0);
  return total;
}

}  // namespace ptycho
