#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "exclab/labeled_coupling.hpp"

using namespace exclab;

namespace {
const RateKernel kP = default_kernel();

std::multiset<int> sites(const LabeledState& s) { return {s.positions().begin(), s.positions().end()}; }
}  // namespace

TEST_SUITE("labeled_coupling") {

TEST_CASE("t_move") {
  const LabeledState s(0, {1, 2, 5});
  CHECK(t_move(s, 0, 2).positions() == std::vector<int>{2, 3, 5});
  CHECK(t_move(s, 1, 1).positions() == std::vector<int>{1, 3, 5});
  CHECK(t_move(s, 0, 0) == s);
  CHECK_THROWS_AS(t_move(s, 0, 1), ContractViolation);
  const LabeledState b(0, {-1, 2}, true);
  CHECK_THROWS_AS(t_move(b, 0, 1), ContractViolation);
  CHECK(t_move(b, 0, 2).positions() == std::vector<int>{1, 2});
}

TEST_CASE("t_move set equality and conjugation over random states") {
  Rng rng(31);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    const bool blocked = rng.bernoulli(0.5);
    const auto s = random_cloud(rng, 1 + static_cast<int>(rng.below(8)), -8, 8,
                                static_cast<long>(rng.below(5)) - 2, blocked);
    const long i = s.first_label() + static_cast<long>(rng.below(s.size()));
    const int z = static_cast<int>(rng.below(7)) - 3;
    if (z == 0 || !s.can_move(i, z)) continue;
    ++checked;
    const auto t = t_move(s, i, z);
    auto expect = sites(s);
    expect.erase(expect.find(s.pos(i)));
    expect.insert(s.pos(i) + z);
    CHECK(sites(t) == expect);
    CHECK(std::is_sorted(t.positions().begin(), t.positions().end()));
    CHECK(std::adjacent_find(t.positions().begin(), t.positions().end()) == t.positions().end());
    CHECK(t.first_label() == s.first_label());
    if (s.can_move(i, -z)) CHECK(t_move(s, i, -z) == reverse(t_move(reverse(s), -i, z)));
  }
  CHECK(checked > 5000);
}

TEST_CASE("theta shift and relabel") {
  const LabeledState s(0, {-3, -1, 1, 4});
  CHECK(theta_shift(s, 2).positions() == std::vector<int>{-5, -3, -1, 2});
  CHECK_THROWS_AS(theta_shift(s, 1), ContractViolation);
  CHECK(theta_shift(theta_shift(s, 2), -2) == s);

  const LabeledState r(0, {-2, -1, 1});
  const auto shifted = s_relabel(r, 1);
  CHECK(shifted.first_label() == -1);
  CHECK(shifted.positions() == r.positions());
  CHECK(s_relabel(r, 0) == r);

  // tagged jump right by one: positions drop by one, then labels drop by one
  const LabeledState x(-2, {-3, -1, 2, 5}, true);
  const auto moved = s_relabel(theta_shift(x, 1), 1);
  CHECK(moved.first_label() == -3);
  CHECK(moved.positions() == std::vector<int>{-4, -2, 1, 4});
  CHECK(moved.pos(-1) == 1);
}

TEST_CASE("k_insert") {
  const LabeledState s(0, {-4, -3, -1, 2, 3});
  const auto k = k_insert(s, 0);
  CHECK(k.first_label() == -1);
  CHECK(k.pos(2) == 0);
  CHECK(k.pos(1) == -1);
  CHECK(k.pos(-1) == -4);
  CHECK(k.pos(3) == 2);
  CHECK(k_insert(s, -3) == s);

  Rng rng(4);
  for (int n = 0; n < 2000; ++n) {
    const auto c = random_cloud(rng, 1 + static_cast<int>(rng.below(8)), -8, 8, 0, false);
    const int x = static_cast<int>(rng.below(17)) - 8;
    const auto t = k_insert(c, x);
    auto expect = sites(c);
    if (!c.occupied(x)) expect.insert(x);
    CHECK(sites(t) == expect);
    CHECK(std::is_sorted(t.positions().begin(), t.positions().end()));
  }
}

TEST_CASE("f_count") {
  CHECK(f_count(LabeledState::step(5)) == 0);
  CHECK(f_count(LabeledState(0, {-5, -2, 3})) == 1);
  CHECK(f_count(LabeledState(0, {2, 3})) == -1);
}

TEST_CASE("order and sentinels") {
  const LabeledState a(0, {1, 3}), b(0, {0, 2});
  CHECK(dominates(a, b));
  CHECK_FALSE(dominates(b, a));
  CHECK(a.position(-1) == LabeledState::kMinusInf);
  CHECK(a.position(2) == LabeledState::kPlusInf);
  // a missing upper label at -infinity cannot dominate a finite one
  CHECK_FALSE(dominates(LabeledState(1, {3}), LabeledState(0, {0, 2})));
}

TEST_CASE("selector examples") {
  for (bool blocked : {false, true}) {
    const LabeledState up(0, {-3, -1}, blocked), lo(0, {-4, -3}, blocked);
    CHECK(target_site(up, lo, 0, 2, 2) == 1);
    CHECK(dominates(t_move(up, 0, 1), t_move(lo, 0, 2)));
  }
  CHECK(target_site(LabeledState(0, {3}), LabeledState(0, {0}), 0, 1, 2) == 0);
  CHECK_THROWS_AS(target_site(LabeledState(0, {0}), LabeledState(0, {3}), 0, 1, 2), ContractViolation);
}

TEST_CASE("selector against every admissible displacement") {
  Rng rng(12);
  const int R = 2;
  for (int k = 0; k < 10000; ++k) {
    const auto c = random_ordered_pair(rng, 1 + static_cast<int>(rng.below(12)), -10, 10, R, rng.bernoulli(0.5));
    REQUIRE(dominates(c.upper, c.lower));
    for (long i = c.lower.first_label(); i <= c.lower.last_label(); ++i) {
      if (!c.upper.tracks(i)) continue;
      for (int z = 1; z <= R; ++z) {
        if (!c.lower.can_move(i, z)) continue;
        const int s = target_site(c.upper, c.lower, i, z, R);
        CHECK(s >= 0);
        CHECK(s <= R);
        CHECK((s == 0 || c.upper.can_move(i, s)));
        CHECK((s == 0 || c.upper.pos(i) + s <= c.lower.pos(i) + z));
        CHECK(dominates(t_move(c.upper, i, s), t_move(c.lower, i, z)));
      }
    }
  }
}

TEST_CASE("joint rates split each upper rate exactly") {
  Rng rng(13);
  for (int k = 0; k < 2000; ++k) {
    const auto c = random_ordered_pair(rng, 1 + static_cast<int>(rng.below(10)), -10, 10, 2, true);
    for (long i = c.lower.first_label(); i <= c.lower.last_label(); ++i) {
      if (!c.upper.tracks(i)) continue;
      std::map<int, double> up, low;
      for (const auto& e : label_events(c, kP, CouplingVariant::kFull, i)) {
        CHECK(e.rate >= 0.0);
        if (e.du > 0) up[e.du] += e.rate;
        if (e.dl < 0) low[e.dl] += e.rate;
      }
      for (int s = 1; s <= 2; ++s) {
        CHECK(up[s] == doctest::Approx(c.upper.can_move(i, s) ? kP(s) : 0.0));
        CHECK(low[-s] == doctest::Approx(c.lower.can_move(i, -s) ? kP(-s) : 0.0));
      }
    }
  }
}

TEST_CASE("identical states move together") {
  Rng rng(14);
  const auto s = random_cloud(rng, 6, -8, 8, 0, true);
  const CoupledState c{s, s};
  for (const auto& e : joint_rates(c, kP, TaggedKernel::zero(), CouplingVariant::kFull)) {
    if (e.rate == 0.0) continue;
    CHECK(e.kind == JointEvent::Kind::kPaired);
    CHECK(e.du == e.dl);
  }
}

TEST_CASE("tagged events") {
  const TaggedKernel q({{1, 0.5}, {-1, 0.25}});
  const auto s = LabeledState(0, {-3, -2, 2}, true);
  const CoupledState c{s, s};
  int upper = 0, lower = 0;
  for (const auto& e : joint_rates(c, kP, q, CouplingVariant::kRight)) upper += e.kind == JointEvent::Kind::kTaggedUpper;
  for (const auto& e : joint_rates(c, kP, q, CouplingVariant::kLeft)) lower += e.kind == JointEvent::Kind::kTaggedLower;
  CHECK(upper == 2);
  CHECK(lower == 2);
  auto cu = c;
  apply_joint(cu, JointEvent{JointEvent::Kind::kTaggedUpper, 0, 1, 0, 0.5});
  CHECK(cu.upper == s_relabel(theta_shift(s, 1), 1));
  CHECK(dominates(cu.upper, cu.lower));
  auto cl = c;
  apply_joint(cl, JointEvent{JointEvent::Kind::kTaggedLower, 0, 0, 1, 0.25});
  CHECK(cl.lower == theta_shift(s, 1));
  CHECK(dominates(cl.upper, cl.lower));
}

TEST_CASE("shift monotonicity") {
  Rng rng(15);
  for (int k = 0; k < 3000; ++k) {
    const auto s = random_cloud(rng, static_cast<int>(rng.below(10)), -8, 8, 0, true);
    for (int z = 1; z <= 2; ++z) {
      if (s.can_shift(-z)) CHECK(dominates(theta_shift(s, -z), s));
      if (s.can_shift(z)) CHECK(dominates(s_relabel(theta_shift(s, z), z), s));
    }
  }
}

TEST_CASE("f_count is antitone") {
  Rng rng(16);
  for (int k = 0; k < 3000; ++k) {
    const auto c = k % 2 ? random_ordered_pair(rng, 1 + static_cast<int>(rng.below(10)), -10, 10, 2, true)
                         : random_packed_pair(rng, 1 + static_cast<int>(rng.below(8)), 2);
    REQUIRE(dominates(c.upper, c.lower));
    CHECK(f_count(c.upper) <= f_count(c.lower));
  }
}

TEST_CASE("coupled runs") {
  const TaggedKernel q({{1, 0.3}, {-1, 0.3}});
  Rng rng(17);
  SUBCASE("zero horizon") {
    auto c = random_ordered_pair(rng, 10, -10, 10, 2, true);
    CoupledRunOptions o;
    const auto rep = coupled_run(c, kP, q, CouplingVariant::kRight, o, rng);
    CHECK(rep.events == 0);
    CHECK_FALSE(rep.violation);
  }
  SUBCASE("order and counting identity") {
    for (auto v : {CouplingVariant::kPlus, CouplingVariant::kFull, CouplingVariant::kRight, CouplingVariant::kLeft}) {
      const bool plus = v == CouplingVariant::kPlus;
      for (int r = 0; r < 5; ++r) {
        auto c = random_ordered_pair(rng, 15, -20, 20, 2, true);
        CoupledRunOptions o;
        o.horizon = 5.0;
        const auto rep = coupled_run(c, plus ? RateKernel({{1, 2.0}, {2, 1.0}}) : kP,
                                     plus ? TaggedKernel::zero() : q, v, o, rng);
        CHECK_FALSE(rep.violation);
        CHECK(rep.order_checks == rep.events);
        const long ru = rep.upper.counters.N + (v == CouplingVariant::kRight ? rep.upper.counters.r : 0);
        const long rl = rep.lower.counters.N - (v == CouplingVariant::kLeft ? rep.lower.counters.l : 0);
        CHECK(rep.upper.f0 - rep.upper.fT == ru);
        CHECK(rep.lower.f0 - rep.lower.fT == rl);
        CHECK(dominates(c.upper, c.lower));
      }
    }
  }
  SUBCASE("rejections") {
    CoupledState bad{LabeledState(0, {-3}, true), LabeledState(0, {2}, true)};
    CoupledRunOptions o;
    o.horizon = 1.0;
    CHECK_THROWS_AS(coupled_run(bad, kP, q, CouplingVariant::kFull, o, rng), std::invalid_argument);
    auto c = random_ordered_pair(rng, 5, -10, 10, 2, true);
    CHECK_THROWS_AS(coupled_run(c, RateKernel({{1, 1.0}, {2, 2.0}}), q, CouplingVariant::kFull, o, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(coupled_run(c, kP, TaggedKernel({{2, 1.0}}), CouplingVariant::kRight, o, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("variant names and log lines") {
  for (auto v : {CouplingVariant::kPlus, CouplingVariant::kFull, CouplingVariant::kRight, CouplingVariant::kLeft})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS(parse_variant("sideways"));
  const CoupledLogLine line{1.5, JointEvent{JointEvent::Kind::kPaired, 3, 1, 2, 1.0}};
  const auto text = format_log_line(line);
  CHECK(text.find("paired,3,2,1") != std::string::npos);
}
}
