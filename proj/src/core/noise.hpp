#ifndef PTYCHO_NOISE_HPP
#define PTYCHO_NOISE_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "forward.hpp"

namespace ptycho {

/// Labels one measurement stream. Identical (master_seed, trial) plus a
/// position index always reproduce bit-identical samples, independent of
/// scheduling.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t trial = 0;
};

/// Deterministic engine for the (seed, position) stream.
std::mt19937_64 make_stream(const RngSeed& seed, std::uint64_t position);

/// One Poisson draw. Inversion by sequential search below mean 10, Hormann's
/// PTRS transformed rejection above; exact for mean 0. Mean must be finite
/// and >= 0.
double sample_poisson(double mean, std::mt19937_64& rng);

/// Draws n_m(xi) ~ Poisson(N_m(xi)) independently across positions and
/// pixels. Returns a stack with both expected and observed planes.
DiffractionStack sample_poisson_stack(const DiffractionStack& expected,
                                      const RngSeed& seed);

/// Per-position SNR map sqrt(n_m). Requires observed counts.
std::vector<RealField> snr_map(const DiffractionStack& counts);

/// Pixelwise mean of the observed planes of T stacks (real-valued; repeated
/// measurements are a sufficient statistic, the mean is kept unrounded).
/// Expected planes are copied from the first stack.
DiffractionStack average_measurements(const std::vector<DiffractionStack>& stacks);

}  // namespace ptycho

#endif
