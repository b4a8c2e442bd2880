#include "doctest.h"

#include <cmath>
#include <vector>

#include "exclab/event_core.hpp"

using namespace exclab;

TEST_SUITE("event_core") {

TEST_CASE("single entry is always drawn") {
  RateTable t;
  t.set(0, 2.0);
  Clock c{0.0, Rng(3)};
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double before = c.now;
    const auto d = sample_next(t, c);
    REQUIRE(d);
    CHECK(d->id == 0);
    sum += c.now - before;
  }
  // mean 0.5, sd of the mean 0.5/sqrt(n)
  CHECK(std::abs(sum / n - 0.5) < 4 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("draw frequencies follow the rates") {
  RateTable t;
  t.set(0, 1.0);
  t.set(1, 3.0);
  Clock c{0.0, Rng(11)};
  const int n = 100000;
  int b = 0;
  for (int k = 0; k < n; ++k) b += sample_next(t, c)->id == 1;
  const double sd = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(double(b) / n - 0.75) < 3 * sd);
}

TEST_CASE("empty table is absorbed") {
  RateTable t;
  Clock c{1.5, Rng(1)};
  CHECK_FALSE(sample_next(t, c));
  CHECK(c.now == 1.5);
  t.set(4, 0.0);
  CHECK_FALSE(sample_next(t, c));
}

TEST_CASE("updates adjust the total") {
  RateTable t;
  t.set(0, 1.0);
  t.set(1, 2.0);
  CHECK(t.total() == doctest::Approx(3.0));
  t.set(0, 0.0);
  CHECK(t.total() == doctest::Approx(2.0));
  t.set(9, 0.5);
  CHECK(t.total() == doctest::Approx(2.5));
  CHECK(t.size() >= 10);
  CHECK_THROWS_AS(t.set(2, -1.0), ContractViolation);
  CHECK_THROWS_AS(t.set(2, NAN), ContractViolation);
}

TEST_CASE("cached total tracks exact resummation") {
  RateTable t(1000);
  Rng rng(5);
  for (int k = 0; k < 1000000; ++k) t.set(rng.below(1000), rng.uniform() * std::pow(10.0, double(rng.below(6)) - 3));
  const double exact = t.exact_total();
  CHECK(std::abs(t.total() - exact) / exact < 1e-9);
}

TEST_CASE("tree descent and linear scan agree") {
  RateTable t(37);
  Rng rng(8);
  for (std::size_t k = 0; k < 37; ++k) t.set(k, k % 5 == 0 ? 0.0 : rng.uniform());
  for (int k = 0; k < 10000; ++k) {
    const double target = rng.uniform() * t.total();
    CHECK(t.find(target) == t.find_linear(target));
  }
  Clock a{0.0, Rng(2)}, b{0.0, Rng(2)};
  for (int k = 0; k < 1000; ++k) {
    const auto da = sample_next(t, a, SamplerKind::kFenwick);
    const auto db = sample_next(t, b, SamplerKind::kLinearScan);
    CHECK(da->id == db->id);
    CHECK(da->time == db->time);
  }
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a = Rng::stream(7, 0), b = Rng::stream(7, 0), c = Rng::stream(7, 1);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
}

TEST_CASE("time averages") {
  SUBCASE("constant") {
    TimeAverager avg({"one"}, 4.0);
    const double one = 1.0;
    avg.reset_values(std::span<const double>(&one, 1));
    avg.finalize(4.0);
    CHECK(avg.average(0) == doctest::Approx(1.0));
  }
  SUBCASE("hand integrated toggles") {
    // 0 on [0,1), 1 on [1,2.5), 0 on [2.5,3), 1 on [3,4]: occupation 2.5/4
    TimeAverager avg({"f"}, 4.0);
    const double zero = 0.0;
    avg.reset_values(std::span<const double>(&zero, 1));
    avg.update(0, 1.0, 1.0);
    avg.update(0, 2.5, 0.0);
    avg.update(0, 3.0, 1.0);
    avg.finalize(4.0);
    CHECK(avg.average(0) == doctest::Approx(0.625));
  }
  SUBCASE("zero-length interval and regression") {
    TimeAverager avg({"f"}, 2.0);
    const double v = 1.0;
    avg.reset_values(std::span<const double>(&v, 1));
    avg.accumulate(1.0, std::span<const double>(&v, 1));
    const double before = avg.integral(0);
    avg.accumulate(1.0, std::span<const double>(&v, 1));
    CHECK(avg.integral(0) == before);
    CHECK_THROWS_AS(avg.accumulate(0.5, std::span<const double>(&v, 1)), ContractViolation);
  }
  SUBCASE("burn-in grid") {
    const auto g = BatchGrid::with_burn_in(10.0, 0.2, 4);
    CHECK(g.start == doctest::Approx(2.0));
    CHECK(g.batch_of(1.0) == -1);
    CHECK(g.batch_of(3.0) == 0);
    CHECK(g.batch_of(10.0) == 3);
  }
}

TEST_CASE("two-state chain occupation") {
  // 0 -> 1 at rate a, 1 -> 0 at rate b: long-run occupation of 1 is a/(a+b)
  const double a = 1.0, b = 3.0, T = 20000.0;
  TimeAverager avg({"state"}, BatchGrid::with_burn_in(T, 0.1, 10));
  Clock c{0.0, Rng(21)};
  RateTable t(1);
  int state = 0;
  double v = 0.0;
  avg.reset_values(std::span<const double>(&v, 1));
  while (true) {
    t.set(0, state ? b : a);
    const auto d = sample_next(t, c);
    if (c.now > T) break;
    state ^= 1;
    avg.update(0, d->time, state);
  }
  avg.finalize(T);
  const auto means = avg.batch_means(0);
  double m = 0.0, ss = 0.0;
  for (double x : means) m += x;
  m /= double(means.size());
  for (double x : means) ss += (x - m) * (x - m);
  const double se = std::sqrt(ss / double(means.size() - 1) / double(means.size()));
  CHECK(std::abs(m - a / (a + b)) < 4 * se + 1e-3);
}
}
