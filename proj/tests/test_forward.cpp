#include <doctest.h>

#include <random>

#include "core/fft.hpp"
#include "oracles.hpp"

using namespace ptycho;

namespace {

ObjectEstimate uniform_object(const Grid2D& g, double a = 1.0, double phi = 0.0) {
  ObjectEstimate obj;
  obj.transmission = RealField(g, a);
  obj.phase = RealField(g, phi);
  return obj;
}

Probe disc_probe(const Grid2D& g, double pn) {
  Probe probe;
  probe.field = ComplexField(g);
  probe.support_radius = 0.5 * std::min(g.nx, g.ny) * g.spacing;
  const double cx = 0.5 * (g.nx - 1), cy = 0.5 * (g.ny - 1);
  const double r0 = probe.support_radius / g.spacing;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x)
      if (std::hypot(x - cx, y - cy) <= r0) probe.field.at(x, y) = 1.0;
  probe.set_photon_number(pn);
  return probe;
}

}  // namespace

TEST_CASE("extract_patch of the unit object is one everywhere") {
  const ObjectEstimate obj = uniform_object({20, 20, 1.0});
  const ComplexField patch = extract_patch(obj, {3, 7}, {16, 16, 1.0});
  for (const cdouble& v : patch.values) CHECK(std::abs(v - cdouble{1.0}) < 1e-15);
}

TEST_CASE("extract_patch at the origin is the top-left window") {
  Grid2D og{70, 70, 1.0};
  ObjectEstimate obj = uniform_object(og);
  for (int y = 0; y < og.ny; ++y)
    for (int x = 0; x < og.nx; ++x) obj.transmission.at(x, y) = x + 100.0 * y;
  const ComplexField patch = extract_patch(obj, {0, 0}, {60, 60, 1.0});
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 60; ++x)
      CHECK(patch.at(x, y).real() == doctest::Approx(x + 100.0 * y));
}

TEST_CASE("full-scale scan placements are accepted on the 70x70 grid") {
  Grid2D og{70, 70, 1.0};
  Grid2D pg{60, 60, 1.0};
  const ScanPattern scan = make_scan(og, pg, 2, 2, 0.7);
  CHECK(scan.step_px == 18);
  REQUIRE(scan.offsets.size() == 4);
  CHECK(scan.offsets[0] == ScanOffset{0, 0});
  CHECK(scan.offsets[1] == ScanOffset{18, 0});
  CHECK(scan.offsets[2] == ScanOffset{0, 18});
  CHECK(scan.offsets[3] == ScanOffset{18, 18});
  const ObjectEstimate obj = uniform_object(og);
  for (ScanOffset o : scan.offsets)
    CHECK_NOTHROW(extract_patch(obj, o, pg));
}

TEST_CASE("extract_patch rejects anchors outside the object grid") {
  const ObjectEstimate obj = uniform_object({20, 20, 1.0});
  CHECK_THROWS_AS(extract_patch(obj, {-1, 0}, {16, 16, 1.0}), Error);
  CHECK_THROWS_AS(extract_patch(obj, {0, 20}, {16, 16, 1.0}), Error);
}

TEST_CASE("exit_wave trivial cases") {
  Grid2D pg{8, 8, 1.0};
  std::mt19937_64 rng(17);
  const Probe probe = testing::random_probe(pg, rng, 25.0);

  const ObjectEstimate unit = uniform_object({8, 8, 1.0});
  const ComplexField psi = exit_wave(probe, unit, {0, 0});
  for (size_t i = 0; i < psi.values.size(); ++i)
    CHECK(std::abs(psi.values[i] - probe.field.values[i]) < 1e-12);

  Probe dark = probe;
  for (cdouble& v : dark.field.values) v = 0.0;
  const ComplexField zero = exit_wave(dark, unit, {0, 0});
  for (const cdouble& v : zero.values) CHECK(v == cdouble{});
}

TEST_CASE("exit_wave matches a scalar loop") {
  Grid2D g{8, 8, 1.0};
  std::mt19937_64 rng(23);
  const Probe probe = testing::random_probe(g, rng, 4.0);
  const ObjectEstimate obj = testing::random_object(g, rng);
  const ComplexField psi = exit_wave(probe, obj, {0, 0});
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const cdouble expected =
          probe.field.at(x, y) * obj.transmission.at(x, y) *
          cdouble(std::cos(obj.phase.at(x, y)), std::sin(obj.phase.at(x, y)));
      CHECK(std::abs(psi.at(x, y) - expected) < 1e-12);
    }
}

TEST_CASE("intensity of delta and constant inputs") {
  Grid2D g{4, 4, 1.0};
  ComplexField delta(g);
  delta.at(0, 0) = 3.0;
  const RealField flat = intensity(delta);
  for (double v : flat.values) CHECK(v == doctest::Approx(9.0));

  ComplexField constant(g, cdouble{0.0, 2.0});
  const RealField peaked = intensity(constant);
  CHECK(peaked.at(0, 0) == doctest::Approx(4.0 * 256.0));  // |c|^2 N^4
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      if (x || y) CHECK(peaked.at(x, y) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("intensity energy bookkeeping follows Parseval") {
  std::mt19937_64 rng(29);
  Grid2D g{8, 8, 1.0};
  const ComplexField psi = testing::random_complex(g, rng);
  const RealField plane = intensity(psi);
  double total = 0.0;
  for (double v : plane.values) total += v;
  CHECK(total == doctest::Approx(64.0 * power(psi)).epsilon(1e-12));
}

TEST_CASE("expected_counts is position-independent for a uniform object") {
  Grid2D og{20, 20, 1.0};
  Grid2D pg{16, 16, 1.0};
  const Probe probe = disc_probe(pg, 1e4);
  const ObjectEstimate obj = uniform_object(og);
  const ScanPattern scan = make_scan(og, pg, 2, 2, 0.7);
  const DiffractionStack stack = expected_counts(probe, obj, scan);
  for (size_t m = 1; m < stack.expected.size(); ++m)
    for (size_t i = 0; i < stack.expected[m].values.size(); ++i)
      CHECK(stack.expected[m].values[i] ==
            doctest::Approx(stack.expected[0].values[i]).epsilon(1e-12));
}

TEST_CASE("scaling the probe scales every expected count quadratically") {
  Grid2D og{12, 12, 1.0};
  Grid2D pg{8, 8, 1.0};
  std::mt19937_64 rng(31);
  Probe probe = testing::random_probe(pg, rng, 9.0);
  const ObjectEstimate obj = testing::random_object(og, rng);
  const ScanPattern scan = make_scan(og, pg, 1, 2, 0.75);

  const DiffractionStack base = expected_counts(probe, obj, scan);
  for (cdouble& v : probe.field.values) v *= 3.0;
  const DiffractionStack scaled = expected_counts(probe, obj, scan);
  for (size_t m = 0; m < base.expected.size(); ++m)
    for (size_t i = 0; i < base.expected[m].values.size(); ++i)
      CHECK(scaled.expected[m].values[i] ==
            doctest::Approx(9.0 * base.expected[m].values[i]).epsilon(1e-12));
}

TEST_CASE("unit-transmission object keeps all probe photons: sum = 4 N_pix PN") {
  Grid2D og{20, 20, 1.0};
  Grid2D pg{16, 16, 1.0};
  const double pn = 1e6;
  const Probe probe = disc_probe(pg, pn);
  const ObjectEstimate obj = uniform_object(og);
  const ScanPattern scan = make_scan(og, pg, 2, 2, 0.7);
  const DiffractionStack stack = expected_counts(probe, obj, scan);
  double total = 0.0;
  for (const RealField& plane : stack.expected)
    for (double v : plane.values) total += v;
  CHECK(total == doctest::Approx(4.0 * 256.0 * pn).epsilon(1e-12));
}

TEST_CASE("make_scan arithmetic and failure modes") {
  CHECK(make_scan({12, 12, 1.0}, {10, 10, 1.0}, 1, 2, 0.6).offsets ==
        std::vector<ScanOffset>{{0, 0}, {4, 0}});
  // overlap -> 1 gives a degenerate zero step
  CHECK_THROWS_AS(make_scan({70, 70, 1.0}, {60, 60, 1.0}, 2, 2, 0.999), Error);
  // pattern anchors beyond the object grid
  CHECK_THROWS_AS(make_scan({10, 10, 1.0}, {60, 60, 1.0}, 2, 2, 0.7), Error);
  CHECK_THROWS_AS(make_scan({70, 70, 1.0}, {60, 60, 1.0}, 2, 2, 1.2), Error);
}

TEST_CASE("global object phase leaves every expected count unchanged") {
  Grid2D og{14, 14, 1.0};
  Grid2D pg{10, 10, 1.0};
  std::mt19937_64 rng(37);
  const Probe probe = testing::random_probe(pg, rng, 100.0);
  ObjectEstimate obj = testing::random_object(og, rng);
  const ScanPattern scan = make_scan(og, pg, 2, 2, 0.7);

  const DiffractionStack base = expected_counts(probe, obj, scan);
  for (double& v : obj.phase.values) v += 1.234;
  const DiffractionStack shifted = expected_counts(probe, obj, scan);
  for (size_t m = 0; m < base.expected.size(); ++m)
    for (size_t i = 0; i < base.expected[m].values.size(); ++i)
      CHECK(shifted.expected[m].values[i] ==
            doctest::Approx(base.expected[m].values[i]).epsilon(1e-10));
}

TEST_CASE("probe normalization is exact for structured and uniform probes") {
  Grid2D pg{16, 16, 1.0};
  Probe uniform = disc_probe(pg, 1e9);
  CHECK(power(uniform.field) == doctest::Approx(1e9).epsilon(1e-12));

  std::mt19937_64 rng(41);
  Probe structured = testing::random_probe(pg, rng, 123.456);
  CHECK(power(structured.field) == doctest::Approx(123.456).epsilon(1e-12));
}

TEST_CASE("expected_counts is translation-consistent") {
  // Shifting the object content circularly and the anchors by the same
  // vector reproduces the stack.
  Grid2D og{15, 15, 1.0};
  Grid2D pg{8, 8, 1.0};
  std::mt19937_64 rng(43);
  const Probe probe = testing::random_probe(pg, rng, 10.0);
  const ObjectEstimate obj = testing::random_object(og, rng);

  const int sx = 2, sy = 3;
  ObjectEstimate moved;
  moved.transmission = RealField(og);
  moved.phase = RealField(og);
  for (int y = 0; y < og.ny; ++y)
    for (int x = 0; x < og.nx; ++x) {
      moved.transmission.at((x + sx) % og.nx, (y + sy) % og.ny) =
          obj.transmission.at(x, y);
      moved.phase.at((x + sx) % og.nx, (y + sy) % og.ny) = obj.phase.at(x, y);
    }

  ScanPattern scan;
  scan.offsets = {{0, 0}, {3, 0}, {0, 3}, {3, 3}};
  ScanPattern shifted;
  shifted.offsets = {{sx, sy}, {3 + sx, sy}, {sx, 3 + sy}, {3 + sx, 3 + sy}};

  const DiffractionStack a = expected_counts(probe, obj, scan);
  const DiffractionStack b = expected_counts(probe, moved, shifted);
  for (size_t m = 0; m < a.expected.size(); ++m)
    for (size_t i = 0; i < a.expected[m].values.size(); ++i)
      CHECK(b.expected[m].values[i] ==
            doctest::Approx(a.expected[m].values[i]).epsilon(1e-10));
}
