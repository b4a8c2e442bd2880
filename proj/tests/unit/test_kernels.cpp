#include "doctest.h"

#include "exclab/kernels.hpp"

using namespace exclab;

TEST_SUITE("kernels") {

TEST_CASE("rate kernel range and rejection") {
  RateKernel p({{1, 2.0}, {-1, 1.0}, {2, 1.0}, {-2, 1.0}});
  CHECK(p.range() == 2);
  CHECK(p(2) == 1.0);
  CHECK(p(3) == 0.0);
  CHECK(RateKernel({{1, 1.0}, {3, 0.0}}).range() == 1);
  CHECK_THROWS_AS(RateKernel({{0, 1.0}}), KernelError);
  CHECK_THROWS_AS(RateKernel({{1, -1.0}}), KernelError);
  CHECK_THROWS_AS(RateKernel({{1, 0.0}}), KernelError);
}

TEST_CASE("A1 and A2") {
  auto r = validate_a1_a2(default_kernel());
  CHECK(r.passed("A1"));
  CHECK(r.passed("A2"));
  CHECK_FALSE(validate_a1_a2(RateKernel({{1, 1.0}, {-1, 1.0}, {2, 1.0}, {-2, 1.0}})).passed("A1"));
  CHECK_FALSE(validate_a1_a2(RateKernel({{1, 2.0}, {-1, 0.5}, {2, 1.0}, {-2, 1.0}})).passed("A2"));
}

TEST_CASE("blockage assumptions") {
  CHECK(validate_blockage_assumptions(default_kernel()).all_pass());
  CHECK_FALSE(validate_blockage_assumptions(RateKernel({{1, 1.0}, {-1, 1.0}})).all_pass());
  CHECK_FALSE(validate_blockage_assumptions(RateKernel({{3, 1.0}, {-3, 2.0}})).all_pass());
}

TEST_CASE("drift") {
  CHECK(drift_mean(default_kernel()) == doctest::Approx(1.0));
  CHECK(drift_mean(RateKernel({{1, 1.0}, {-1, 1.0}, {3, 0.5}, {-3, 0.5}})) == doctest::Approx(0.0));
  CHECK(drift_mean(RateKernel({{2, 3.0}, {-2, 1.0}})) == doctest::Approx(4.0));
}

TEST_CASE("class C decomposition") {
  const auto pair = class_c_decompose(default_kernel());
  CHECK(pair.plus(1) == 2.0);
  CHECK(pair.plus(2) == 1.0);
  CHECK(pair.minus(1) == 1.0);
  CHECK(pair.minus(2) == 1.0);
  CHECK(pair.plus.monotone());
  CHECK(pair.minus.monotone());
  CHECK_THROWS_AS(class_c_decompose(RateKernel({{1, 1.0}, {2, 2.0}})), KernelError);
  const auto nn = class_c_decompose(RateKernel({{1, 0.5}, {-1, 0.5}}));
  CHECK(nn.plus(1) == 0.5);
  CHECK(nn.minus(1) == 0.5);
}

TEST_CASE("recombination reproduces the kernel") {
  for (const auto& p : {default_kernel(), RateKernel({{1, 3.0}, {2, 2.0}, {3, 1.0}, {-1, 0.5}})}) {
    const auto pair = class_c_decompose(p);
    for (int x = -6; x <= 6; ++x)
      for (int y = -6; y <= 6; ++y) {
        if (x == 0 || y == 0 || x == y) continue;
        CHECK(pair.combined(x, y) == doctest::Approx(p(y - x)));
      }
  }
}

TEST_CASE("bernoulli current") {
  const auto p = default_kernel();
  CHECK(bernoulli_current(p, 0.5) == doctest::Approx(0.25));
  CHECK(bernoulli_current(p, 0.0) == 0.0);
  CHECK(bernoulli_current(p, 1.0) == 0.0);
  for (double rho : {0.1, 0.3, 0.45}) CHECK(bernoulli_current(p, rho) == doctest::Approx(bernoulli_current(p, 1 - rho)));
}

TEST_CASE("tagged kernel") {
  CHECK(TaggedKernel::zero().is_zero());
  TaggedKernel q({{1, 0.01}, {-1, 0.012}});
  CHECK(q.total() == doctest::Approx(0.022));
  CHECK(q(-1) == 0.012);
}
}
