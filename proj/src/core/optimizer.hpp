#ifndef PTYCHO_OPTIMIZER_HPP
#define PTYCHO_OPTIMIZER_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "objectives.hpp"

namespace ptycho {

enum class Algorithm {
  max_likelihood,  // Poisson negative log-likelihood
  amplitude        // amplitude-based cost
};

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct CgConfig {
  int max_iterations = 1000;
  double objective_change_stop = 1e-20;
  double gamma_initial = 1e-5;   // 1e-5 for ML, 1e-3 for amplitude
  double gamma_after = 1e-20;
  int gamma_switch_iteration = 11;  // first iteration that uses gamma_after
  std::vector<double> alpha_probes{0.01, 0.5, 1.0};

  static CgConfig defaults(Algorithm algorithm);
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  double objective = 0.0;
  double alpha_transmission = 0.0;
  double alpha_phase = 0.0;
  double beta_transmission = 0.0;
  double beta_phase = 0.0;
  double grad_norm_transmission = 0.0;
  double grad_norm_phase = 0.0;
  bool fallback_transmission = false;  // line-search result was discarded
  bool fallback_phase = false;
};

struct RunTrace {
  double initial_objective = 0.0;
  std::vector<IterationRecord> iterations;
  bool reached_max_iterations = false;
  int monotonicity_violations = 0;  // combined updates that raised the objective

  /// Columns: iteration, objective, alpha_A, alpha_phi, beta_A, beta_phi,
  /// grad_norm_A, grad_norm_phi.
  void write_csv(std::ostream& out) const;
};

/// Polak-Ribiere coefficient max(<g_now - g_prev, g_now> / ||g_prev||^2, 0).
/// A zero previous gradient restarts the direction (returns 0).
double polak_ribiere_beta(const RealField& g_now, const RealField& g_prev);

/// Least-squares quadratic fit through (alpha_i, objective(alpha_i)). Returns
/// the vertex when the fit is convex with a positive vertex (clamped to
/// 10 * max probe); otherwise the best probed alpha. Non-finite values drop
/// their probe; with no finite probe at all the step is 0.
double quadratic_line_search(const std::function<double(double)>& objective,
                             const std::vector<double>& alpha_probes);

struct CgResult {
  ObjectEstimate estimate;
  RunTrace trace;
};

/// Conjugate-gradient descent on the selected objective. Per iteration:
/// channel gradients, Polak-Ribiere betas (independently per channel),
/// conjugate directions, per-channel quadratic line searches, simultaneous
/// update. gamma switches from gamma_initial to gamma_after at iteration
/// gamma_switch_iteration; stops at max_iterations or when the objective
/// change drops to objective_change_stop.
CgResult run_cg(const Probe& probe, const ScanPattern& scan,
                const DiffractionStack& counts, Algorithm algorithm,
                const CgConfig& config, const ObjectEstimate& init);

}  // namespace ptycho

#endif
