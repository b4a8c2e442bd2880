// Statistical invariants at small sizes.

#include "doctest.h"

#include <cmath>

#include "exclab/env_process.hpp"
#include "exclab/half_line.hpp"

using namespace exclab;

namespace {
const RateKernel kP = default_kernel();

struct Stat {
  double mean = 0.0, se = 0.0;
};

Stat stat(const std::vector<double>& v) {
  Stat s;
  for (double x : v) s.mean += x;
  s.mean /= double(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
  return s;
}

bool agree(const Stat& a, const Stat& b, double sigmas = 3.0) {
  return std::abs(a.mean - b.mean) <= sigmas * std::sqrt(a.se * a.se + b.se * b.se) + 1e-12;
}

// Bulk density of m..n with the given reservoirs, one value per replica.
std::vector<double> bulk_density(const RateKernel& p, int n, double lambda, double rho, double T, int replicas,
                                 std::uint64_t seed, int from, int count) {
  std::vector<double> out;
  for (int r = 0; r < replicas; ++r) {
    Rng rng = Rng::stream(seed, r);
    BoundaryState s(1, n, lambda, rho);
    BoundaryRunOptions o;
    o.horizon = T;
    o.grid = BatchGrid::with_burn_in(T, 0.2, 1);
    o.patterns = {{0}};
    const auto rep = run_boundary(s, p, o, rng);
    out.push_back(cesaro_translate(rep.trackers[0].profile(), from, count));
  }
  return out;
}
}  // namespace

TEST_SUITE("properties") {

TEST_CASE("counting and instantaneous currents agree") {
  std::vector<double> counted, inst;
  for (int r = 0; r < 6; ++r) {
    Rng rng = Rng::stream(41, r);
    auto s = EnvState::init(40, StepInit{}, 1.0, 0.0);
    EnvRunOptions o;
    o.horizon = 1500.0;
    o.grid = BatchGrid::with_burn_in(o.horizon, 0.2, 1);
    o.use_grid = true;
    o.boundary_monitor = false;
    o.currents = {{5, 6, CurrentMode::kCounting}, {5, 6, CurrentMode::kInstantaneous}};
    const auto rep = run_env(s, kP, TaggedKernel::zero(), o, rng);
    counted.push_back(rep.currents[0].value);
    inst.push_back(rep.currents[1].value);
  }
  CHECK(agree(stat(counted), stat(inst)));
}

TEST_CASE("bulk density grows with the reservoir densities") {
  const double levels[] = {0.2, 0.5, 0.8};
  Stat grid[3][3];
  std::uint64_t seed = 100;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) grid[a][b] = stat(bulk_density(kP, 40, levels[a], levels[b], 600.0, 4, seed++, 10, 20));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Stat& x = grid[a][b];
      if (a + 1 < 3) {
        const Stat& y = grid[a + 1][b];
        CHECK(y.mean >= x.mean - 3 * std::sqrt(x.se * x.se + y.se * y.se));
      }
      if (b + 1 < 3) {
        const Stat& y = grid[a][b + 1];
        CHECK(y.mean >= x.mean - 3 * std::sqrt(x.se * x.se + y.se * y.se));
      }
    }
}

TEST_CASE("symmetric dynamics keep the step order") {
  const RateKernel sym({{1, 1.5}, {-1, 1.5}, {2, 1.0}, {-2, 1.0}});
  const int n = 24, reps = 4;
  const double T = 3000.0;
  std::vector<std::vector<double>> prof(n + 1);
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(55, r);
    BoundaryState s(1, n, 1.0, 0.0);
    BoundaryRunOptions o;
    o.horizon = T;
    o.grid = BatchGrid::with_burn_in(T, 0.2, 1);
    o.patterns = {{0}};
    const auto p = run_boundary(s, sym, o, rng).trackers[0].profile();
    for (int x = 1; x <= n; ++x) prof[x].push_back(p.at(x));
  }
  for (int x = 1; x + 4 <= n; x += 4) {
    const Stat a = stat(prof[x]), b = stat(prof[x + 4]);
    CHECK(b.mean <= a.mean + 3 * std::sqrt(a.se * a.se + b.se * b.se));
  }
}

TEST_CASE("shifting a Cesaro window moves the mean by at most 1/N") {
  BoundaryRunOptions o;
  o.horizon = 100.0;
  o.patterns = {{0}, {0, 1}};
  Rng rng(5);
  const auto rep = run_half_line_creation(80, kP, o, rng);
  for (const auto& t : rep.trackers) {
    const auto prof = t.profile();
    for (int from = 10; from < 40; ++from)
      CHECK(std::abs(cesaro_translate(prof, from + 1, 30) - cesaro_translate(prof, from, 30)) <= 1.0 / 30 + 1e-12);
  }
}
}
