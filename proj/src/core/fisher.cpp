#include "fisher.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>

#include "fft.hpp"

namespace ptycho {
namespace {

int wrap(int v, int n) {
  v %= n;
  return v < 0 ? v + n : v;
}

// Spectral ratio F(psi)/F(psi)* == exp(2i arg F(psi)). Computed through the
// unit phasor so arbitrarily small magnitudes stay well conditioned; an exact
// zero contributes nothing.
ComplexField spectral_ratio(const ComplexField& spectrum) {
  ComplexField ratio(spectrum.grid);
  for (size_t i = 0; i < spectrum.values.size(); ++i) {
    const cdouble g = spectrum.values[i];
    const double mag = std::abs(g);
    if (mag == 0.0) {
      ratio.values[i] = 0.0;
    } else {
      const cdouble phasor = g / mag;
      ratio.values[i] = phasor * phasor;
    }
  }
  return ratio;
}

}  // namespace

cdouble AuxKernel::eval(int ix, int iy, int jx, int jy) const {
  const Grid2D& g = ratio_field.grid;
  const cdouble base = ratio_field.at(wrap(ix + jx, g.nx), wrap(iy + jy, g.ny));
  return base * site_factor[static_cast<size_t>(g.index(ix, iy))] *
         site_factor[static_cast<size_t>(g.index(jx, jy))];
}

AuxKernel aux_kernel(const ComplexField& psi, const ComplexField& probe_window,
                     const RealField& phase_window) {
  if (!psi.all_finite()) throw_invalid("exit wave must be finite");
  if (!psi.grid.same_shape(probe_window.grid) ||
      !psi.grid.same_shape(phase_window.grid))
    throw_invalid("aux_kernel inputs must share the probe frame");

  AuxKernel kernel;
  kernel.ratio_field = idft2(spectral_ratio(dft2(psi)));
  kernel.site_factor.resize(psi.values.size());
  for (size_t i = 0; i < psi.values.size(); ++i)
    kernel.site_factor[i] = std::conj(probe_window.values[i]) *
                            std::polar(1.0, -phase_window.values[i]);
  return kernel;
}

FisherMatrix assemble_fisher(const Probe& probe, const ObjectEstimate& obj,
                             const ScanPattern& scan) {
  obj.validate();
  const Grid2D& og = obj.grid();
  const Grid2D& pg = probe.field.grid;
  const int k_obj = og.pixel_count();
  const int n_pix = pg.pixel_count();

  FisherMatrix fisher;
  fisher.object_grid = og;
  fisher.m = Eigen::MatrixXd::Zero(2 * k_obj, 2 * k_obj);
  Eigen::MatrixXd& f = fisher.m;

  // Probe pixels carrying power, with their local and global indices.
  struct Site {
    int local;    // index in the probe frame
    int global;   // object pixel index
    cdouble q;    // conj(P) * exp(-i phi)
    double p2;    // |P|^2
    double a;     // transmission at the pixel
  };

  for (ScanOffset offset : scan.offsets) {
    ComplexField psi = exit_wave(probe, obj, offset);
    ComplexField ratio_field = idft2(spectral_ratio(dft2(psi)));

    std::vector<Site> sites;
    sites.reserve(static_cast<size_t>(n_pix));
    for (int v = 0; v < pg.ny; ++v) {
      const int gy = wrap(offset.dy + v, og.ny);
      for (int u = 0; u < pg.nx; ++u) {
        const cdouble p = probe.field.at(u, v);
        if (p == cdouble{}) continue;
        const int gx = wrap(offset.dx + u, og.nx);
        Site s;
        s.local = pg.index(u, v);
        s.global = og.index(gx, gy);
        s.a = obj.transmission.at(gx, gy);
        s.q = std::conj(p) * std::polar(1.0, -obj.phase.at(gx, gy));
        s.p2 = std::norm(p);
        sites.push_back(s);
      }
    }

    // Pair term: 2 * N_pix * Re/Im combinations of
    //   ratio_field[(u_i+u_j) mod frame] * q_i * q_j.
    const double pair_scale = 2.0 * n_pix;
    for (const Site& si : sites) {
      const int ux = si.local % pg.nx;
      const int uy = si.local / pg.nx;
      for (const Site& sj : sites) {
        const int vx = sj.local % pg.nx;
        const int vy = sj.local / pg.nx;
        const cdouble k = pair_scale *
                          ratio_field.at(wrap(ux + vx, pg.nx), wrap(uy + vy, pg.ny)) *
                          si.q * sj.q;
        const int i = si.global;
        const int j = sj.global;
        f(i, j) += k.real();
        f(i, k_obj + j) += sj.a * k.imag();
        f(k_obj + i, j) += si.a * k.imag();
        f(k_obj + i, k_obj + j) -= si.a * sj.a * k.real();
      }
    }

    // Diagonal term: 2 * N_pix * |P|^2 on AA, times A^2 on phi-phi.
    for (const Site& s : sites) {
      const double d = 2.0 * n_pix * s.p2;
      f(s.global, s.global) += d;
      f(k_obj + s.global, k_obj + s.global) += s.a * s.a * d;
    }
  }
  return fisher;
}

CrlbMap crlb_from_fisher(const FisherMatrix& fisher, double rel_tol) {
  const Eigen::MatrixXd& f = fisher.m;
  const int n = static_cast<int>(f.rows());
  const int k_obj = fisher.object_grid.pixel_count();
  if (n != 2 * k_obj) throw_invalid("fisher matrix size does not match its grid");

  const double fro = f.norm();
  const double asym = (f - f.transpose()).norm();
  if (fro > 0.0 && asym > 1e-10 * fro)
    throw_invalid("fisher matrix is not symmetric");

  if (rel_tol < 0.0)
    rel_tol = k_obj * std::numeric_limits<double>::epsilon();

  // dsyevd overwrites the (symmetrized) matrix with the eigenvectors.
  Eigen::MatrixXd vectors = 0.5 * (f + f.transpose());
  Eigen::VectorXd eigenvalues(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vectors.data(), n,
                     eigenvalues.data());
  if (info != 0) throw_numeric("eigendecomposition failed (dsyevd info=" +
                               std::to_string(info) + ")");

  const double lambda_max = eigenvalues.size() ? eigenvalues.maxCoeff() : 0.0;
  const double cutoff = rel_tol * std::max(lambda_max, 0.0);

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    const double lambda = eigenvalues(k);
    if (lambda <= cutoff) continue;
    ++rank;
    const double inv = 1.0 / lambda;
    for (int i = 0; i < n; ++i) {
      const double v = vectors(i, k);
      diag(i) += v * v * inv;
    }
  }

  CrlbMap map;
  map.rank = rank;
  map.tolerance = rel_tol;
  map.transmission_bound = RealField(fisher.object_grid);
  map.phase_bound = RealField(fisher.object_grid);
  for (int i = 0; i < k_obj; ++i) {
    // Pixels the data never inform (zero Fisher diagonal) are reported as 0.
    map.transmission_bound.values[i] = (f(i, i) == 0.0) ? 0.0 : diag(i);
    map.phase_bound.values[i] =
        (f(k_obj + i, k_obj + i) == 0.0) ? 0.0 : diag(k_obj + i);
  }
  return map;
}

}  // namespace ptycho
