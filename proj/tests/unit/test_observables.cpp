#include "doctest.h"

#include <cmath>

#include "exclab/lattice.hpp"
#include "exclab/observables.hpp"

using namespace exclab;

namespace {
const RateKernel kP = default_kernel();

Segment window(int W, bool fill_left, bool fill_right) {
  Segment seg(SegmentGeometry{-W, W, true, BoundaryKind::kReservoir, 1.0, 0.0});
  for (int x = -W; x <= W; ++x) {
    if (x == 0) continue;
    seg.set(x, x < 0 ? fill_left : fill_right);
  }
  return seg;
}
}  // namespace

TEST_SUITE("observables") {

TEST_CASE("cylinder names round-trip") {
  const auto c = CylinderSpec::product({-1}, {1});
  CHECK(c.name() == "[x=-1](1-x=1)");
  CHECK(CylinderSpec::parse(c.name()).name() == c.name());
  CHECK(CylinderSpec::parse("[x=3][x=4]").terms()[0].ones.size() == 2);
  CHECK_THROWS_AS(CylinderSpec::product({1}, {1}), std::invalid_argument);
  auto occ = [](int x) { return x < 0; };
  CHECK(c.evaluate(occ) == 1.0);
  CHECK(CylinderSpec::product({1}, {}).evaluate(occ) == 0.0);
}

TEST_CASE("instantaneous current") {
  CHECK(instantaneous_current(window(5, true, false), kP, -1, 1) == doctest::Approx(1.0));
  CHECK(instantaneous_current(window(5, false, false), kP, -1, 1) == 0.0);
  CHECK(instantaneous_current(window(5, true, true), kP, -1, 1) == 0.0);
  CHECK_THROWS_AS(instantaneous_current(window(5, true, false), kP, 4, 5), std::invalid_argument);
}

TEST_CASE("cesaro translates") {
  TranslateProfile flat{{0}, 0, std::vector<double>(50, 0.3)};
  CHECK(cesaro_translate(flat, 10, 20) == doctest::Approx(0.3));
  CHECK_THROWS_AS(cesaro_translate(flat, 40, 20), std::out_of_range);
  CHECK_THROWS_AS(cesaro_translate(flat, 10, 0), std::invalid_argument);

  // product measure at density 1/2: pair translates average 1/4
  Rng rng(6);
  const int sites = 400, samples = 2000;
  std::vector<double> avg(sites - 1, 0.0);
  for (int k = 0; k < samples; ++k) {
    std::vector<int> eta(sites);
    for (auto& e : eta) e = rng.bernoulli(0.5);
    for (int i = 0; i + 1 < sites; ++i) avg[i] += eta[i] * eta[i + 1];
  }
  for (auto& a : avg) a /= samples;
  TranslateProfile pair{{0, 1}, 0, avg};
  // per-site variance 3/16 plus neighbor covariance 2 x 1/16
  const double se = std::sqrt(5.0 / 16.0 / (399.0 * samples));
  CHECK(std::abs(cesaro_translate(pair, 0, 399) - 0.25) < 4 * se);
}

TEST_CASE("G profile") {
  TranslateProfile zero{{0}, -10, std::vector<double>(21, 0.0)};
  for (double g : g_profile(zero, kP, -5, 5)) CHECK(g == 0.0);
  TranslateProfile one{{0}, -10, std::vector<double>(21, 1.0)};
  // sum_{|j|<=1} sum_{k=|j|+1}^{2} p(k): j=0 gives p(1)+p(2)=3, j=+-1 give p(2)=1 each
  for (double g : g_profile(one, kP, -5, 5)) CHECK(g == doctest::Approx(5.0));
}

TEST_CASE("batch CI") {
  const std::vector<double> flat(5, 2.0);
  const auto c = batch_ci(flat, 0.99);
  CHECK(c.halfwidth == 0.0);
  CHECK(c.degenerate);
  const std::vector<double> two = {1.0, 3.0};
  const auto t = batch_ci(two, 0.95);
  // 1 degree of freedom: t = 12.706, se = 1
  CHECK(t.halfwidth == doctest::Approx(12.7062).epsilon(1e-4));
  CHECK_THROWS_AS(batch_ci(std::vector<double>{1.0}, 0.99), std::invalid_argument);
  CHECK_THROWS_AS(batch_ci(two, 1.5), std::invalid_argument);
}

TEST_CASE("batch CI coverage") {
  Rng rng(77);
  int covered = 0;
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) {
    std::vector<double> v(10);
    for (auto& x : v) x = rng.normal();
    const auto c = batch_ci(v, 0.95);
    covered += c.lo() <= 0.0 && 0.0 <= c.hi();
  }
  CHECK(std::abs(double(covered) / trials - 0.95) < 0.02);
}

TEST_CASE("CI shrinks with more input") {
  Rng rng(78);
  std::vector<double> small(16), large(256);
  for (auto& x : small) x = rng.normal();
  for (auto& x : large) x = rng.normal();
  const double ratio = batch_ci(small).halfwidth / batch_ci(large).halfwidth;
  CHECK(ratio > 2.0);
  CHECK(ratio < 8.0);
}

TEST_CASE("chi-square two-sample") {
  Rng rng(5);
  std::vector<long> a(3000), b(3000), c(3000);
  for (auto& x : a) x = static_cast<long>(rng.below(6));
  for (auto& x : b) x = static_cast<long>(rng.below(6));
  for (auto& x : c) x = static_cast<long>(rng.below(6)) + (rng.bernoulli(0.2) ? 1 : 0);
  CHECK(chi_square_two_sample(a, b).p_value > 0.001);
  CHECK(chi_square_two_sample(a, c).p_value < 1e-6);
  CHECK_THROWS_AS(chi_square_two_sample(std::vector<long>{}, b), std::invalid_argument);
}

TEST_CASE("torus current") {
  Rng rng(1);
  const auto r = run_torus(64, 32, kP, 50.0, rng);
  CHECK(r.events > 0);
  CHECK(r.current > 0.0);
  CHECK_THROWS_AS(run_torus(4, 2, kP, 1.0, rng), std::invalid_argument);
}
}
