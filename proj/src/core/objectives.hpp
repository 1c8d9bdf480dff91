#ifndef PTYCHO_OBJECTIVES_HPP
#define PTYCHO_OBJECTIVES_HPP

#include "forward.hpp"

namespace ptycho {

struct ObjectiveValue {
  double value = 0.0;
  double gamma = 0.0;
};

struct Gradient {
  RealField wrt_transmission;
  RealField wrt_phase;
};

/// Poisson negative log-likelihood
///   L = -sum_m sum_xi [ n ln(N + gamma) - N ]
/// with the object-independent ln n! term dropped (so real-valued averaged
/// counts are accepted). N is the expected-count stack of `obj`.
ObjectiveValue neg_log_likelihood(const ObjectEstimate& obj, const Probe& probe,
                                  const ScanPattern& scan,
                                  const DiffractionStack& counts, double gamma);

/// Amplitude distance E = sum_m sum_xi (sqrt(n) - |F(psi_m)|)^2.
ObjectiveValue amplitude_cost(const ObjectEstimate& obj, const Probe& probe,
                              const ScanPattern& scan,
                              const DiffractionStack& counts);

/// Analytic gradient of neg_log_likelihood with respect to (A, phi). The
/// returned fields are the true ascent gradients of the implemented
/// objective (central finite differences reproduce them), so a step
/// obj <- obj - alpha * g decreases L for small alpha > 0.
Gradient grad_neg_log_likelihood(const ObjectEstimate& obj, const Probe& probe,
                                 const ScanPattern& scan,
                                 const DiffractionStack& counts, double gamma);

/// Gradient of the amplitude cost; gamma regularizes the sqrt(N + gamma)
/// denominator exactly as the update rule writes it (the cost itself carries
/// no gamma, so finite differences match at gamma == 0).
Gradient grad_amplitude_cost(const ObjectEstimate& obj, const Probe& probe,
                             const ScanPattern& scan,
                             const DiffractionStack& counts, double gamma);

/// Diagnostic: the dropped constant sum_m sum_xi ln Gamma(n + 1), for
/// absolute-likelihood reporting.
double dropped_likelihood_constant(const DiffractionStack& counts);

}  // namespace ptycho

#endif
