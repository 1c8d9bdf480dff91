#ifndef PTYCHO_MONTECARLO_HPP
#define PTYCHO_MONTECARLO_HPP

#include <cstdint>

#include "fisher.hpp"
#include "optimizer.hpp"

namespace ptycho {

struct CampaignConfig {
  int trials = 0;
  int repeats = 1;  // T measurements per position, averaged before fitting
  std::uint64_t master_seed = 0;
  bool noise_free = false;  // counts = expected; for degenerate checks
  int threads = 0;          // 0 = hardware concurrency

  void validate() const;
};

/// Runs `trials` independent reconstructions. Trial t draws `repeats` Poisson
/// stacks on streams (master_seed, t * repeats + rho), averages them, and
/// fits starting from the supplied init. Results are a pure function of the
/// configuration and master seed regardless of thread count.
std::vector<ObjectEstimate> run_campaign(const Probe& probe,
                                         const ObjectEstimate& truth,
                                         const ScanPattern& scan,
                                         Algorithm algorithm,
                                         const CgConfig& cg,
                                         const CampaignConfig& campaign);

struct McStatistics {
  RealField mean_transmission, mean_phase;
  RealField var_transmission, var_phase;    // population convention, divisor T
  RealField bias2_transmission, bias2_phase;
  double bvr_transmission = 0.0;  // sum bias^2 / sum var (0/0 -> 0)
  double bvr_phase = 0.0;
  int trials = 0;
};

/// Per-pixel mean, population variance and squared bias against the truth.
/// Phase differences are wrapped to (-pi, pi] before any statistics.
McStatistics statistics(const std::vector<ObjectEstimate>& estimates,
                        const ObjectEstimate& truth);

struct CrlbComparison {
  double var_sum_transmission = 0.0;
  double var_sum_phase = 0.0;
  double crlb_sum_transmission = 0.0;
  double crlb_sum_phase = 0.0;
  double ratio_transmission = 0.0;  // var sum / bound sum over informed pixels
  double ratio_phase = 0.0;
  double bvr_transmission = 0.0;
  double bvr_phase = 0.0;
  int informed_transmission = 0;  // pixels with a positive bound
  int informed_phase = 0;
};

/// Aggregates variance against the bound over pixels where the bound is
/// positive (never-informed pixels carry bound 0 and are excluded).
CrlbComparison compare_to_crlb(const McStatistics& stats, const CrlbMap& crlb);

}  // namespace ptycho

#endif
