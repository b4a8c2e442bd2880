#include "doctest.h"

#include "exclab/half_line.hpp"

using namespace exclab;

namespace {
const RateKernel kP = default_kernel();

double rate_of(const std::vector<RatedMove>& moves, Move::Kind k, int site) {
  double r = 0.0;
  for (const auto& m : moves)
    if (m.move.kind == k && m.move.from == site) r += m.rate;
  return r;
}
}  // namespace

TEST_SUITE("half_line") {

TEST_CASE("boundary rates") {
  BoundaryState s(1, 10, 1.0, 0.0);
  const auto moves = boundary_rates(s, kP);
  CHECK(rate_of(moves, Move::Kind::kCreateLeft, 1) == doctest::Approx(3.0));
  CHECK(rate_of(moves, Move::Kind::kCreateLeft, 2) == doctest::Approx(1.0));
  CHECK(rate_of(moves, Move::Kind::kCreateRight, 10) == 0.0);

  BoundaryState full(1, 10, 1.0, 0.0);
  for (int x = 1; x <= 10; ++x) full.set(x, true);
  const auto fm = boundary_rates(full, kP);
  CHECK(rate_of(fm, Move::Kind::kDestroyLeft, 1) == 0.0);
  CHECK(rate_of(fm, Move::Kind::kDestroyRight, 10) == doctest::Approx(3.0));
}

TEST_CASE("half line from empty") {
  BoundaryRunOptions o;
  o.horizon = 0.0;
  o.patterns = {{0}};
  Rng rng(1);
  const auto rep = run_half_line_creation(40, kP, o, rng);
  const auto prof = rep.trackers[0].profile();
  for (double v : prof.avg) CHECK(v == 0.0);
  CHECK_THROWS_AS(run_half_line_creation(7, kP, o, rng), std::invalid_argument);
  CHECK_THROWS_AS(run_half_line_creation(40, RateKernel({{1, 1.0}, {-1, 1.0}}), o, rng), std::invalid_argument);
}

TEST_CASE("current bound") {
  CHECK(current_lower_bound(kP, 0.5, 0.0) == doctest::Approx(0.25));
  CHECK(current_lower_bound(kP, 0.0, 0.0) == 0.0);
  CHECK(current_lower_bound(kP, 1.0, 0.5) == doctest::Approx(0.25));
  CurrentCheckOptions o;
  o.horizon = 200.0;
  o.replicas = 2;
  const auto c = current_bound_check(1, 30, kP, 0.0, 0.0, o);
  CHECK(c.bound == 0.0);
  CHECK(c.pass);
  CHECK_THROWS_AS(current_bound_check(1, 4, kP, 0.5, 0.0, o), std::invalid_argument);
  CHECK_THROWS_AS(current_bound_check(1, 30, kP, 0.2, 0.5, o), std::invalid_argument);
}

TEST_CASE("three classes") {
  ClassedState s(6, 2);
  CHECK(s.class_at(-1) == 1);
  CHECK(s.class_at(1) == 2);
  CHECK(s.class_at(2) == 2);
  CHECK(s.class_at(3) == 3);
  CHECK(s.count(1) + s.count(2) + s.count(3) == 12);

  // a class-3 hole that reaches a site <= R turns class 2 for good
  const int id = s.hole_at(3);
  s.swap(2, 3);
  CHECK(s.hole_at(2) == id);
  CHECK(s.class_at(2) == 2);
  s.swap(-1, 4);  // a particle jumps over to 4
  s.swap(4, 2);   // and on to 2, pushing the hole back to 4
  CHECK(s.hole_at(4) == id);
  CHECK(s.class_at(4) == 2);
  CHECK(s.count(1) + s.count(2) + s.count(3) == 12);

  const auto zero = run_three_class(20, kP, 0.0, {{1}, {}}, 10, 1);
  CHECK(zero.estimates[0].three_class == 0.0);
  CHECK(zero.estimates[1].three_class == 1.0);

  const auto rep = run_three_class(40, kP, 3.0, {{1}}, 50, 2);
  CHECK(rep.conserved);
  CHECK(rep.class3_monotone);
}
}
