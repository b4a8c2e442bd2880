#include "doctest.h"

#include "exclab/env_process.hpp"

using namespace exclab;

namespace {
const RateKernel kP = default_kernel();
}

TEST_SUITE("env_process") {

TEST_CASE("init") {
  const auto s = EnvState::init(3, StepInit{}, 1.0, 0.0);
  for (int x = -3; x <= -1; ++x) CHECK(s.occupied(x));
  for (int x = 1; x <= 3; ++x) CHECK_FALSE(s.occupied(x));
  CHECK_FALSE(s.occupied(0));

  Rng rng(1);
  const auto full = EnvState::init(2, BernoulliInit{1.0}, 1.0, 0.0, rng);
  CHECK(full.particle_count() == 4);

  const auto e = EnvState::init(2, ExplicitInit{{1, 0, 0, 1}}, 1.0, 0.0);
  CHECK(e.occupied(-2));
  CHECK_FALSE(e.occupied(-1));
  CHECK_FALSE(e.occupied(1));
  CHECK(e.occupied(2));
  CHECK_THROWS_AS(EnvState::init(2, ExplicitInit{{1, 0, 0}}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("exchange rates on the step") {
  const auto s = EnvState::init(5, StepInit{}, 1.0, 0.0);
  const auto moves = exchange_rates(s, kP);
  bool cross = false, back = false;
  double interior = 0.0;
  for (const auto& m : moves) {
    if (m.move.kind != Move::Kind::kExchange) continue;
    interior += m.rate;
    if (m.move.from == -1 && m.move.to == 1) {
      cross = true;
      CHECK(m.rate == 1.0);
    }
    if (m.move.from == 1 && m.move.to == -1) back = true;
  }
  CHECK(cross);
  CHECK_FALSE(back);
  // brute force: x occupied, y vacant, both in the window and nonzero
  double naive = 0.0;
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y)
      if (x && y && x != y && s.occupied(x) && !s.occupied(y)) naive += kP(y - x);
  CHECK(interior == doctest::Approx(naive));

  const auto full = EnvState::init(4, BernoulliInit{1.0}, 1.0, 1.0);
  Rng rng(2);
  for (const auto& m : exchange_rates(EnvState::init(4, BernoulliInit{1.0}, 1.0, 1.0, rng), kP))
    CHECK(m.move.kind != Move::Kind::kExchange);
  (void)full;
}

TEST_CASE("cut counters") {
  auto s = EnvState::init(4, StepInit{}, 1.0, 0.0);
  apply_exchange(s, -1, 1);
  CHECK(s.counters().R == 1);
  apply_exchange(s, -2, -1);
  CHECK(s.counters().R == 1);
  CHECK(s.counters().L == 0);
  apply_exchange(s, 1, -2);
  CHECK(s.counters().L == 1);
  CHECK(s.counters().N() == 0);
  CHECK_THROWS_AS(apply_exchange(s, 3, 4), ContractViolation);
}

TEST_CASE("tagged shift") {
  Rng rng(4);
  auto s = EnvState::init(4, StepInit{}, 1.0, 0.0);
  apply_tagged_shift(s, 1, rng);
  CHECK(s.counters().r == 1);
  CHECK_FALSE(s.occupied(-1));
  CHECK(s.occupied(-4));
  CHECK_FALSE(s.occupied(4));  // right edge refilled from rho = 0
  auto step = EnvState::init(4, StepInit{}, 1.0, 0.0);
  CHECK_THROWS_AS(apply_tagged_shift(step, -1, rng), ContractViolation);

  auto t = EnvState::init(4, StepInit{}, 1.0, 0.0);
  const auto start = t.segment().bits();
  std::vector<std::uint8_t> before(start.begin(), start.end());
  apply_tagged_shift(t, 1, rng);
  apply_tagged_shift(t, -1, rng);
  const auto after = t.segment().bits();
  CHECK(std::vector<std::uint8_t>(after.begin(), after.end()) == before);
  CHECK(t.counters().D() == 0);
}

TEST_CASE("runs") {
  Rng rng(9);
  auto s = EnvState::init(60, StepInit{}, 1.0, 0.0);
  EnvRunOptions o;
  o.horizon = 0.0;
  CHECK(run_env(s, kP, TaggedKernel::zero(), o, rng).counters.N() == 0);

  o.horizon = 10.0;
  o.record_log = true;
  o.cylinders = {CylinderSpec::product({-1}, {1})};
  const TaggedKernel q({{1, 0.3}, {-1, 0.3}});
  auto s2 = EnvState::init(60, StepInit{}, 1.0, 0.0);
  const auto rep = run_env(s2, kP, q, o, rng);
  CHECK(rep.conserved());
  CHECK(replay_cut_count(rep.log) == rep.counters.N());
  CHECK(rep.cylinders.size() == 1);
  CHECK(rep.cylinders[0].value >= 0.0);
  CHECK(rep.cylinders[0].value <= 1.0);
  CHECK_THROWS_AS(run_env(s2, kP, TaggedKernel({{2, 1.0}}), o, rng), std::invalid_argument);
}

TEST_CASE("same seed, same log") {
  EnvRunOptions o;
  o.horizon = 5.0;
  o.record_log = true;
  const TaggedKernel q({{1, 0.2}, {-1, 0.1}});
  auto a = EnvState::init(40, StepInit{}, 1.0, 0.0), b = a;
  Rng ra = Rng::stream(3, 0), rb = Rng::stream(3, 0);
  const auto x = run_env(a, kP, q, o, ra), y = run_env(b, kP, q, o, rb);
  REQUIRE(x.log.size() == y.log.size());
  for (std::size_t k = 0; k < x.log.size(); ++k) {
    CHECK(x.log[k].t == y.log[k].t);
    CHECK(x.log[k].kind == y.log[k].kind);
    CHECK(x.log[k].a == y.log[k].a);
  }
}

TEST_CASE("linear scan sampler reproduces the event sequence") {
  EnvRunOptions o;
  o.horizon = 5.0;
  o.record_log = true;
  auto a = EnvState::init(40, StepInit{}, 1.0, 0.0), b = a;
  Rng ra(12), rb(12);
  const auto x = run_env(a, kP, TaggedKernel::zero(), o, ra);
  o.sampler = SamplerKind::kLinearScan;
  const auto y = run_env(b, kP, TaggedKernel::zero(), o, rb);
  CHECK(x.events == y.events);
  CHECK(x.counters.N() == y.counters.N());
}
}
