#include "noise.hpp"

#include <cmath>

namespace ptycho {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in the open interval (0, 1); engine output is fully specified by
// the standard, so streams are reproducible across platforms.
double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1p-52;
}

double poisson_inversion(double mean, std::mt19937_64& rng) {
  const double limit = std::exp(-mean);
  double product = 1.0;
  double k = -1.0;
  do {
    product *= uniform_open(rng);
    k += 1.0;
  } while (product > limit);
  return k;
}

// Hormann (1993) PTRS transformed rejection, valid for mean >= 10.
double poisson_ptrs(double mean, std::mt19937_64& rng) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform_open(rng) - 0.5;
    const double v = uniform_open(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return k;
  }
}

}  // namespace

std::mt19937_64 make_stream(const RngSeed& seed, std::uint64_t position) {
  std::uint64_t s = splitmix64(seed.master_seed);
  s = splitmix64(s ^ (0xa0761d6478bd642fULL * (seed.trial + 1)));
  s = splitmix64(s ^ (0xe7037ed1a0b428dbULL * (position + 1)));
  return std::mt19937_64(s);
}

double sample_poisson(double mean, std::mt19937_64& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw_invalid("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0.0;
  if (mean < 10.0) return poisson_inversion(mean, rng);
  return poisson_ptrs(mean, rng);
}

DiffractionStack sample_poisson_stack(const DiffractionStack& expected,
                                      const RngSeed& seed) {
  expected.validate_geometry();
  DiffractionStack out;
  out.expected = expected.expected;
  out.observed.reserve(expected.expected.size());
  for (size_t m = 0; m < expected.expected.size(); ++m) {
    const RealField& plane = expected.expected[m];
    if (!plane.all_finite()) throw_invalid("expected counts must be finite");
    std::mt19937_64 rng = make_stream(seed, m);
    RealField counts(plane.grid);
    for (size_t i = 0; i < plane.values.size(); ++i) {
      if (plane.values[i] < 0.0) throw_invalid("expected counts must be >= 0");
      counts.values[i] = sample_poisson(plane.values[i], rng);
    }
    out.observed.push_back(std::move(counts));
  }
  return out;
}

std::vector<RealField> snr_map(const DiffractionStack& counts) {
  if (!counts.has_observed()) throw_invalid("snr_map requires observed counts");
  std::vector<RealField> maps;
  maps.reserve(counts.observed.size());
  for (const RealField& plane : counts.observed) {
    RealField snr(plane.grid);
    for (size_t i = 0; i < plane.values.size(); ++i) {
      if (plane.values[i] < 0.0) throw_invalid("counts must be >= 0");
      snr.values[i] = std::sqrt(plane.values[i]);
    }
    maps.push_back(std::move(snr));
  }
  return maps;
}

DiffractionStack average_measurements(const std::vector<DiffractionStack>& stacks) {
  if (stacks.empty()) throw_invalid("average_measurements needs at least one stack");
  const DiffractionStack& first = stacks.front();
  if (!first.has_observed()) throw_invalid("stacks must carry observed counts");
  first.validate_geometry();

  DiffractionStack out;
  out.expected = first.expected;
  out.observed = first.observed;
  for (size_t t = 1; t < stacks.size(); ++t) {
    const DiffractionStack& s = stacks[t];
    if (!s.has_observed() || s.observed.size() != out.observed.size())
      throw_invalid("stacks must share geometry");
    for (size_t m = 0; m < out.observed.size(); ++m) {
      if (!s.observed[m].grid.same_shape(out.observed[m].grid))
        throw_invalid("stacks must share geometry");
      for (size_t i = 0; i < out.observed[m].values.size(); ++i)
        out.observed[m].values[i] += s.observed[m].values[i];
    }
  }
  const double inv_t = 1.0 / static_cast<double>(stacks.size());
  for (RealField& plane : out.observed)
    for (double& v : plane.values) v *= inv_t;
  return out;
}

}  // namespace ptycho
