#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/fisher.hpp"
#include "core/noise.hpp"
#include "core/optimizer.hpp"
#include "core/scenario.hpp"
#include "oracles.hpp"

using namespace ptycho;

namespace {

RealField vec(std::initializer_list<double> values) {
  RealField f({static_cast<int>(values.size()), 1, 1.0});
  size_t i = 0;
  for (double v : values) f.values[i++] = v;
  return f;
}

CaseSpec desk_case(int id, double pn) {
  CaseSpec spec;
  spec.case_id = id;
  spec.object_grid = {20, 20, 1.0};
  spec.probe_grid = {16, 16, 1.0};
  spec.support_radius = 8.0;
  spec.photon_number = pn;
  return spec;
}

}  // namespace

TEST_CASE("polak-ribiere coefficient") {
  const RealField g1 = vec({1.0, 2.0, -1.0});
  CHECK(polak_ribiere_beta(g1, g1) == 0.0);  // numerator vanishes

  const RealField a = vec({1.0, 0.0});
  const RealField b = vec({0.0, 2.0});
  // Orthogonal gradients: beta = |g_now|^2 / |g_prev|^2.
  CHECK(polak_ribiere_beta(b, a) == doctest::Approx(4.0));

  // <(g_now - g_prev), g_now> with g_now = -g_prev is +2 |g|^2, so the
  // reset does not fire on a pure sign flip.
  RealField neg = g1;
  for (double& v : neg.values) v = -v;
  CHECK(polak_ribiere_beta(neg, g1) == doctest::Approx(2.0));

  // Anti-correlated gradients with a small norm do trigger the reset.
  const RealField prev = vec({1.0, 0.0});
  const RealField now = vec({0.1, 0.1});  // raw beta = (0.02 - 0.1) / 1 < 0
  CHECK(polak_ribiere_beta(now, prev) == 0.0);

  const RealField zero = vec({0.0, 0.0, 0.0});
  CHECK(polak_ribiere_beta(g1, zero) == 0.0);  // restart on zero gradient
}

TEST_CASE("quadratic line search finds exact vertices") {
  const std::vector<double> probes{0.01, 0.5, 1.0};
  CHECK(quadratic_line_search(
            [](double a) { return (a - 0.3) * (a - 0.3); }, probes) ==
        doctest::Approx(0.3));
  CHECK(quadratic_line_search(
            [](double a) { return 2.0 * a * a - a + 5.0; }, probes) ==
        doctest::Approx(0.25));
}

TEST_CASE("line search falls back to the best probe on non-convex fits") {
  const std::vector<double> probes{0.01, 0.5, 1.0};
  CHECK(quadratic_line_search([](double a) { return -a; }, probes) == 1.0);
  // Concave parabola: smallest probed value wins.
  CHECK(quadratic_line_search([](double a) { return -a * a; }, probes) == 1.0);
  // Negative vertex: fall back to the best probe (here the smallest alpha).
  CHECK(quadratic_line_search([](double a) { return (a + 1.0) * (a + 1.0); },
                              probes) == 0.01);
}

TEST_CASE("line search drops non-finite probes") {
  const std::vector<double> probes{0.01, 0.5, 1.0};
  // One bad probe leaves two valid points: best finite probe wins.
  CHECK(quadratic_line_search(
            [](double a) {
              if (a > 0.9) return std::numeric_limits<double>::quiet_NaN();
              return 1.0 - a;
            },
            probes) == 0.5);
  // All probes bad: zero step.
  CHECK(quadratic_line_search(
            [](double) { return std::numeric_limits<double>::infinity(); },
            probes) == 0.0);
}

TEST_CASE("line search vertex is clamped to ten times the largest probe") {
  const std::vector<double> probes{0.01, 0.5, 1.0};
  CHECK(quadratic_line_search(
            [](double a) { return (a - 1000.0) * (a - 1000.0); }, probes) ==
        doctest::Approx(10.0));
}

TEST_CASE("exact data and truth init are a fixed point of both algorithms") {
  const Scenario sc = build_case(desk_case(1, 1e5));
  DiffractionStack counts = expected_counts(sc.probe, sc.truth, sc.scan);
  counts.observed = counts.expected;

  for (Algorithm algo : {Algorithm::max_likelihood, Algorithm::amplitude}) {
    // Stationarity at exact data holds for gamma 0; a positive gamma shifts
    // the optimum by O(gamma/N).
    CgConfig config = CgConfig::defaults(algo);
    config.gamma_initial = 0.0;
    config.gamma_after = 0.0;
    const CgResult result = run_cg(sc.probe, sc.scan, counts, algo, config, sc.truth);
    // Zero gradient: the run stops at the first objective-change check.
    CHECK(result.trace.iterations.size() == 1);
    CHECK_FALSE(result.trace.reached_max_iterations);
    for (size_t i = 0; i < sc.truth.transmission.values.size(); ++i) {
      CHECK(result.estimate.transmission.values[i] ==
            doctest::Approx(sc.truth.transmission.values[i]).epsilon(1e-10));
      CHECK(result.estimate.phase.values[i] ==
            doctest::Approx(sc.truth.phase.values[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("noisy high-dose reconstruction stays within five sigma of truth") {
  const Scenario sc = build_case(desk_case(1, 1e9));
  const DiffractionStack expected = expected_counts(sc.probe, sc.truth, sc.scan);
  const DiffractionStack counts = sample_poisson_stack(expected, {424242, 0});

  const CgConfig config = CgConfig::defaults(Algorithm::max_likelihood);
  const CgResult result =
      run_cg(sc.probe, sc.scan, counts, Algorithm::max_likelihood, config, sc.truth);

  CHECK(result.trace.iterations.back().objective <=
        result.trace.initial_objective);

  const CrlbMap crlb =
      crlb_from_fisher(assemble_fisher(sc.probe, sc.truth, sc.scan));
  for (size_t i = 0; i < crlb.transmission_bound.values.size(); ++i) {
    const double sigma_a = std::sqrt(crlb.transmission_bound.values[i]);
    const double da = std::fabs(result.estimate.transmission.values[i] -
                                sc.truth.transmission.values[i]);
    CHECK(da <= 5.0 * sigma_a + 1e-12);
    const double sigma_p = std::sqrt(crlb.phase_bound.values[i]);
    const double dp = std::fabs(result.estimate.phase.values[i] -
                                sc.truth.phase.values[i]);
    CHECK(dp <= 5.0 * sigma_p + 1e-12);
  }
}

TEST_CASE("objective trace is non-increasing up to the logged tolerance") {
  const Scenario sc = build_case(desk_case(3, 1e4));
  const DiffractionStack expected = expected_counts(sc.probe, sc.truth, sc.scan);
  const DiffractionStack counts = sample_poisson_stack(expected, {5150, 3});

  CgConfig config = CgConfig::defaults(Algorithm::amplitude);
  config.max_iterations = 40;
  const CgResult result =
      run_cg(sc.probe, sc.scan, counts, Algorithm::amplitude, config, sc.truth);
  CHECK(result.trace.monotonicity_violations == 0);
  double previous = result.trace.initial_objective;
  for (const IterationRecord& r : result.trace.iterations) {
    CHECK(r.objective <= previous + 1e-9 * std::fabs(previous) + 1e-12);
    previous = r.objective;
  }
}

TEST_CASE("trace CSV carries the expected columns") {
  const Scenario sc = build_case(desk_case(1, 1e3));
  const DiffractionStack expected = expected_counts(sc.probe, sc.truth, sc.scan);
  const DiffractionStack counts = sample_poisson_stack(expected, {7, 0});
  CgConfig config = CgConfig::defaults(Algorithm::max_likelihood);
  config.max_iterations = 5;
  const CgResult result = run_cg(sc.probe, sc.scan, counts,
                                 Algorithm::max_likelihood, config, sc.truth);

  std::ostringstream csv;
  result.trace.write_csv(csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "iteration,objective,alpha_A,alpha_phi,beta_A,beta_phi,grad_norm_A,"
        "grad_norm_phi");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(result.trace.iterations.size()) + 1);
}

TEST_CASE("config validation rejects degenerate settings") {
  CgConfig config = CgConfig::defaults(Algorithm::max_likelihood);
  config.alpha_probes = {0.1, 0.1, 0.5};
  CHECK_THROWS_AS(config.validate(), Error);
  config = CgConfig::defaults(Algorithm::max_likelihood);
  config.alpha_probes = {0.1, 0.5};
  CHECK_THROWS_AS(config.validate(), Error);
  config = CgConfig::defaults(Algorithm::max_likelihood);
  config.max_iterations = 0;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("gamma defaults differ per algorithm") {
  CHECK(CgConfig::defaults(Algorithm::max_likelihood).gamma_initial ==
        doctest::Approx(1e-5));
  CHECK(CgConfig::defaults(Algorithm::amplitude).gamma_initial ==
        doctest::Approx(1e-3));
}
