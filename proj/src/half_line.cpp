#include "exclab/half_line.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exclab {

namespace {

Segment make_segment(int m, int n, double lambda, double rho) {
  if (n < m) throw std::invalid_argument("boundary system: need m <= n");
  SegmentGeometry g;
  g.lo = m;
  g.hi = n;
  g.origin_blocked = false;
  g.boundary = BoundaryKind::kReservoir;
  g.left_density = lambda;
  g.right_density = rho;
  return Segment(g);
}

}  // namespace

BoundaryState::BoundaryState(int m, int n, double lambda, double rho) : seg_(make_segment(m, n, lambda, rho)) {}

void BoundaryState::fill_bernoulli(double density, Rng& rng) {
  for (int x = m(); x <= n(); ++x) seg_.set(x, rng.bernoulli(density));
}

std::vector<RatedMove> boundary_rates(const BoundaryState& s, const RateKernel& p) {
  return SegmentDynamics(p, s.segment()).enumerate(s.segment());
}

BoundaryReport run_boundary(BoundaryState& s, const RateKernel& p, const BoundaryRunOptions& opt, Rng& rng) {
  const double T = opt.horizon;
  if (T < 0.0) throw std::invalid_argument("boundary run: negative horizon");
  if (opt.grid.start < 0.0 || opt.grid.end > T || opt.grid.batches < 1)
    throw std::invalid_argument("boundary run: averaging window must lie in [0, T]");
  Segment& seg = s.segment();
  auto occ = [&seg](int x) { return seg.occupied(x); };

  BoundaryReport rep;
  rep.T = T;
  for (const auto& A : opt.patterns) {
    if (A.empty()) throw std::invalid_argument("boundary run: empty pattern");
    const auto [lo, hi] = std::minmax_element(A.begin(), A.end());
    const int first = s.m() - *lo;
    const int count = s.n() - *hi - first + 1;
    if (count < 1) throw std::invalid_argument("boundary run: pattern does not fit in the segment");
    rep.trackers.emplace_back(A, first, count, opt.grid);
    rep.trackers.back().reset(occ, 0.0);
  }
  for (int b : opt.bonds)
    if (b < s.m() || b + 1 > s.n()) throw std::invalid_argument("boundary run: bond outside the segment");
  TallySeries tallies(opt.bonds.size(), opt.grid);

  SegmentDynamics dyn(p, seg);
  Clock clock{0.0, rng};
  auto changed = [&](int x, double t) {
    for (auto& tr : rep.trackers) tr.site_changed(occ, x, t);
  };
  while (true) {
    const auto draw = sample_next(dyn.table(), clock);
    if (!draw || draw->time > T) break;
    const double t = draw->time;
    ++rep.events;
    const Move m = dyn.select(seg, draw->id, clock.rng.uniform());
    apply_move(seg, m);
    dyn.refresh_near(seg, m.from);
    changed(m.from, t);
    if (m.kind == Move::Kind::kExchange) {
      dyn.refresh_near(seg, m.to);
      changed(m.to, t);
      for (std::size_t k = 0; k < opt.bonds.size(); ++k) {
        const int c = crossing(m, opt.bonds[k], opt.bonds[k] + 1);
        if (c != 0) tallies.add(k, t, c);
      }
    }
  }
  rng = clock.rng;
  for (auto& tr : rep.trackers) tr.finalize(T);
  for (std::size_t k = 0; k < opt.bonds.size(); ++k)
    rep.currents.push_back({"C[" + std::to_string(opt.bonds[k]) + "," + std::to_string(opt.bonds[k] + 1) + "]",
                            tallies.rate(k), tallies.batch_rates(k)});
  return rep;
}

BoundaryReport run_half_line_creation(int n, const RateKernel& p, const BoundaryRunOptions& opt, Rng& rng) {
  if (n < 4 * p.range()) throw std::invalid_argument("half line: need n >= 4R");
  if (!(drift_mean(p) > 0.0)) throw std::invalid_argument("half line: the drift must be positive");
  BoundaryState s(1, n, 1.0, 0.0);
  return run_boundary(s, p, opt, rng);
}

double current_lower_bound(const RateKernel& p, double lambda, double rho) {
  return drift_mean(p) * std::max(lambda * (1.0 - lambda), rho * (1.0 - rho));
}

CurrentCheck current_bound_check(int m, int n, const RateKernel& p, double lambda, double rho,
                                 const CurrentCheckOptions& opt) {
  if (n - m <= 2 * p.range()) throw std::invalid_argument("current check: need n - m > 2R");
  if (lambda < rho) throw std::invalid_argument("current check: need lambda >= rho");
  if (opt.replicas < 1) throw std::invalid_argument("current check: need at least one replica");
  CurrentCheck out;
  out.bond = (m + n) / 2;
  out.bound = current_lower_bound(p, lambda, rho);
  BoundaryRunOptions ro;
  ro.horizon = opt.horizon;
  ro.grid = BatchGrid::with_burn_in(opt.horizon, opt.burn_in, opt.batches);
  ro.bonds = {out.bond};
  std::vector<double> batches;
  for (int r = 0; r < opt.replicas; ++r) {
    Rng rng = Rng::stream(opt.seed, static_cast<std::uint64_t>(r));
    BoundaryState s(m, n, lambda, rho);
    s.fill_bernoulli(lambda, rng);
    const auto rep = run_boundary(s, p, ro, rng);
    const auto& b = rep.currents.front().batches;
    batches.insert(batches.end(), b.begin(), b.end());
  }
  out.measured = batch_ci(batches, opt.confidence);
  out.pass = out.measured.mean >= out.bound - out.measured.halfwidth;
  return out;
}

ClassedState::ClassedState(int W, int R) : W_(W), R_(R), hole_(static_cast<std::size_t>(2 * W), -1) {
  if (W < 1 || R < 1) throw std::invalid_argument("three-class state: need W >= 1 and R >= 1");
  for (int x = 1; x <= W; ++x) {
    const int id = static_cast<int>(class_of_.size());
    class_of_.push_back(x <= R ? 2 : 3);
    hole_[index(x)] = id;
  }
}

int ClassedState::class_at(int x) const {
  const int h = hole_[index(x)];
  return h < 0 ? 1 : class_of_[static_cast<std::size_t>(h)];
}

int ClassedState::count(int cls) const {
  int c = 0;
  for (int x = -W_; x <= W_; ++x)
    if (x != 0 && class_at(x) == cls) ++c;
  return c;
}

void ClassedState::place_hole(int x, int id) {
  hole_[index(x)] = id;
  if (id >= 0 && x <= R_) class_of_[static_cast<std::size_t>(id)] = 2;
}

void ClassedState::swap(int x, int y) {
  if (!contains(x) || !contains(y)) throw ContractViolation("three-class swap outside the window");
  if (!(class_at(x) < class_at(y))) throw ContractViolation("three-class swap needs priority of the jumper");
  const int hx = hole_[index(x)];
  const int hy = hole_[index(y)];
  place_hole(y, hx);
  place_hole(x, hy);
}

void ClassedState::fill_from_left(int x) {
  if (class_at(x) == 1) throw ContractViolation("three-class fill on a particle");
  hole_[index(x)] = -1;
}

void ClassedState::drain_to_right(int x) {
  if (class_at(x) == 3) throw ContractViolation("three-class drain of a third-class hole");
  const int id = static_cast<int>(class_of_.size());
  class_of_.push_back(3);
  place_hole(x, id);
}

namespace {

/// Moves out of site x in the three-class window; kind 0 swap to y, 1 fill
/// from the left reservoir, 2 drain to the right reservoir.
template <class F>
void classed_moves(const ClassedState& s, const RateKernel& p, int x, F&& f) {
  const int W = s.W(), R = p.range();
  const int c = s.class_at(x);
  for (const auto& [d, rate] : p.rates()) {
    const int y = x + d;
    if (s.contains(y) && c < s.class_at(y)) f(0, y, rate);
  }
  if (c > 1 && x - (-W) < R) {
    double r = 0.0;
    for (int d = x + W + 1; d <= R; ++d) r += p(d);
    if (r > 0.0) f(1, x, r);
  }
  if (c < 3 && W - x < R) {
    double r = 0.0;
    for (int d = W - x + 1; d <= R; ++d) r += p(d);
    if (r > 0.0) f(2, x, r);
  }
}

}  // namespace

ThreeClassReport run_three_class(int W, const RateKernel& p, double T, const std::vector<std::set<int>>& sets,
                                 int replicas, std::uint64_t seed) {
  const int R = p.range();
  if (W < 2 * R) throw std::invalid_argument("three-class: window too small for the kernel range");
  if (replicas < 1) throw std::invalid_argument("three-class: need at least one replica");
  for (const auto& B : sets)
    for (int x : B)
      if (x + R < 1 || x + R > W) throw std::invalid_argument("three-class: set B + R must lie in 1..W");

  ThreeClassReport rep;
  rep.replicas = replicas;
  std::vector<long> hits3(sets.size(), 0), hits1(sets.size(), 0);
  auto slot = [W](int x) { return static_cast<std::size_t>(x < 0 ? x + W : x + W - 1); };
  for (int r = 0; r < replicas; ++r) {
    Clock clock{0.0, Rng::stream(seed, static_cast<std::uint64_t>(r))};
    ClassedState s(W, R);
    RateTable table(static_cast<std::size_t>(2 * W));
    auto refresh = [&](int x) {
      double total = 0.0;
      classed_moves(s, p, x, [&](int, int, double rate) { total += rate; });
      table.set(slot(x), total);
    };
    auto refresh_near = [&](int x) {
      for (int y = std::max(-W, x - R); y <= std::min(W, x + R); ++y)
        if (y != 0) refresh(y);
    };
    for (int x = -W; x <= W; ++x)
      if (x != 0) refresh(x);
    int n3 = s.count(3);
    bool flagged = false;
    auto edge_check = [&](int x) {
      if (x < -W + R && s.class_at(x) != 1) flagged = true;
      if (x > W - R && s.class_at(x) != 3) flagged = true;
    };
    while (true) {
      const auto draw = sample_next(table, clock);
      if (!draw || draw->time > T) break;
      const int x = static_cast<int>(draw->id) < W ? static_cast<int>(draw->id) - W : static_cast<int>(draw->id) - W + 1;
      double total = 0.0;
      classed_moves(s, p, x, [&](int, int, double rate) { total += rate; });
      const double target = clock.rng.uniform() * total;
      double acc = 0.0;
      int kind = -1, y = x;
      classed_moves(s, p, x, [&](int k, int yy, double rate) {
        if (kind >= 0 && acc > target) return;
        acc += rate;
        kind = k;
        y = yy;
      });
      if (kind == 0) {
        const int before3 = (s.class_at(x) == 3) + (s.class_at(y) == 3);
        s.swap(x, y);
        const int after3 = (s.class_at(x) == 3) + (s.class_at(y) == 3);
        n3 += after3 - before3;
        if (after3 > before3) rep.class3_monotone = false;
        refresh_near(x);
        refresh_near(y);
        edge_check(x);
        edge_check(y);
      } else if (kind == 1) {
        if (s.class_at(x) == 3) --n3;
        s.fill_from_left(x);
        refresh_near(x);
        flagged = true;
      } else {
        s.drain_to_right(x);
        if (s.class_at(x) == 3) {
          ++n3;
          rep.class3_monotone = false;
        }
        refresh_near(x);
        flagged = true;
      }
    }
    if (s.count(1) + s.count(2) + s.count(3) != 2 * W || s.count(3) != n3) rep.conserved = false;
    if (flagged) ++rep.flagged;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      bool not3 = true, all1 = true;
      for (int b : sets[k]) {
        const int c = s.class_at(b + R);
        not3 = not3 && c != 3;
        all1 = all1 && c == 1;
      }
      hits3[k] += not3;
      hits1[k] += all1;
    }
  }
  const double n = replicas;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    ThreeClassEstimate e;
    e.B = sets[k];
    e.three_class = hits3[k] / n;
    e.three_class_se = std::sqrt(e.three_class * (1.0 - e.three_class) / n);
    e.particle = hits1[k] / n;
    e.particle_se = std::sqrt(e.particle * (1.0 - e.particle) / n);
    rep.estimates.push_back(e);
  }
  return rep;
}

std::vector<std::pair<double, double>> blockage_occupation(int W, const RateKernel& p, double T,
                                                           const std::vector<std::set<int>>& sets, int replicas,
                                                           std::uint64_t seed, int* flagged) {
  const int R = p.range();
  if (replicas < 1) throw std::invalid_argument("blockage occupation: need at least one replica");
  std::vector<long> hits(sets.size(), 0);
  int nflag = 0;
  EnvRunOptions opt;
  opt.horizon = T;
  for (int r = 0; r < replicas; ++r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    EnvState s = EnvState::init(W, StepInit{}, 1.0, 0.0, rng);
    const auto rep = run_env(s, p, TaggedKernel::zero(), opt, rng);
    nflag += rep.flagged;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      bool all = true;
      for (int b : sets[k]) all = all && s.occupied(b + R);
      hits[k] += all;
    }
  }
  if (flagged) *flagged = nflag;
  std::vector<std::pair<double, double>> out;
  for (long h : hits) {
    const double f = static_cast<double>(h) / replicas;
    out.emplace_back(f, std::sqrt(f * (1.0 - f) / replicas));
  }
  return out;
}

}  // namespace exclab
