#ifndef PTYCHO_FISHER_HPP
#define PTYCHO_FISHER_HPP

#include <Eigen/Dense>

#include "forward.hpp"

namespace ptycho {

/// Factored form of the pair kernel
///   f(r_i, r_j) = idft2[ F(psi)/F(psi)* ]((r_i + r_j) mod grid)
///                 * conj(P(r_i)) conj(P(r_j)) exp(-i(phi_i + phi_j)).
/// `ratio_field` holds idft2 of the spectral ratio (the ratio is defined as 0
/// where |F(psi)| == 0); `site_factor[i]` holds conj(P_i) exp(-i phi_i).
struct AuxKernel {
  ComplexField ratio_field;
  std::vector<cdouble> site_factor;

  cdouble eval(int ix, int iy, int jx, int jy) const;
};

/// Builds the factored kernel for one probe position. `probe_window` and
/// `phase_window` are the probe field and object phase on the probe frame.
AuxKernel aux_kernel(const ComplexField& psi, const ComplexField& probe_window,
                     const RealField& phase_window);

/// Dense symmetric Fisher information matrix over the (A, phi) unknowns.
/// Layout: indices [0, K) are transmission pixels in row-major order,
/// [K, 2K) are phase pixels, K = object pixel count.
struct FisherMatrix {
  Eigen::MatrixXd m;
  Grid2D object_grid;

  int unknowns() const { return static_cast<int>(m.rows()); }
};

/// Assembles the Fisher matrix position by position using the factored
/// kernel: one FFT plus O(K_probe^2) multiplies per position instead of a
/// transform per pixel pair. Entries carry the explicit Parseval factor
/// (nx*ny of the probe frame) fixed by the expectation-of-Hessian oracle, so
/// the matrix is the Fisher information of the implemented likelihood, not
/// just proportional to it.
FisherMatrix assemble_fisher(const Probe& probe, const ObjectEstimate& obj,
                             const ScanPattern& scan);

/// Per-pixel Cramer-Rao bounds extracted from the Fisher matrix.
/// Never-informed pixels (zero Fisher diagonal) carry the value 0.
struct CrlbMap {
  RealField transmission_bound;
  RealField phase_bound;
  int rank = 0;
  double tolerance = 0.0;
};

/// Eigendecomposition pseudoinverse: eigenvalues <= rel_tol * lambda_max are
/// discarded, the bound is the diagonal of the reconstructed inverse.
/// rel_tol < 0 selects the default K * machine-epsilon.
CrlbMap crlb_from_fisher(const FisherMatrix& fisher, double rel_tol = -1.0);

}  // namespace ptycho

#endif
