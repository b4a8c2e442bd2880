#include "exclab/env_process.hpp"

#include <functional>
#include <stdexcept>

namespace exclab {

namespace {

Segment make_window(int W, double lambda_left, double rho_right) {
  if (W < 1) throw std::invalid_argument("env: window half-width W must be >= 1");
  SegmentGeometry g;
  g.lo = -W;
  g.hi = W;
  g.origin_blocked = true;
  g.boundary = BoundaryKind::kReservoir;
  g.left_density = lambda_left;
  g.right_density = rho_right;
  return Segment(g);
}

struct Tracked {
  std::string name;
  int lo = 0;
  int hi = 0;
  std::function<double(const Segment&)> eval;
};

}  // namespace

EnvState EnvState::init(int W, const EnvInit& initial, double lambda_left, double rho_right, Rng& rng) {
  EnvState s;
  s.seg_ = make_window(W, lambda_left, rho_right);
  if (std::holds_alternative<StepInit>(initial)) {
    for (int x = -W; x <= -1; ++x) s.seg_.set(x, true);
  } else if (const auto* b = std::get_if<BernoulliInit>(&initial)) {
    if (!(b->rho >= 0.0 && b->rho <= 1.0)) throw std::invalid_argument("env: Bernoulli density must lie in [0, 1]");
    for (int x = -W; x <= W; ++x)
      if (x != 0) s.seg_.set(x, rng.bernoulli(b->rho));
  } else {
    const auto& bits = std::get<ExplicitInit>(initial).bits;
    if (bits.size() != static_cast<std::size_t>(2 * W))
      throw std::invalid_argument("env: explicit initial state needs " + std::to_string(2 * W) + " bits, got " +
                                  std::to_string(bits.size()));
    s.seg_.assign(bits);
  }
  return s;
}

EnvState EnvState::init(int W, const EnvInit& initial, double lambda_left, double rho_right) {
  if (const auto* b = std::get_if<BernoulliInit>(&initial); b && b->rho > 0.0 && b->rho < 1.0)
    throw std::invalid_argument("env: a random Bernoulli initial state needs a random stream");
  Rng unused;
  return init(W, initial, lambda_left, rho_right, unused);
}

std::vector<RatedMove> exchange_rates(const EnvState& s, const RateKernel& p) {
  return SegmentDynamics(p, s.segment()).enumerate(s.segment());
}

void apply_exchange(EnvState& s, int x, int y) {
  Segment& seg = s.segment();
  if (x == 0 || y == 0) throw ContractViolation("exchange: the origin is the tagged particle's seat");
  if (!seg.occupied(x) || !seg.contains(y) || seg.occupied(y))
    throw ContractViolation("exchange " + std::to_string(x) + "->" + std::to_string(y) +
                            ": need an occupied source and a vacant target");
  seg.set(x, false);
  seg.set(y, true);
  if (x <= -1 && y >= 1) ++s.counters().R;
  if (x >= 1 && y <= -1) ++s.counters().L;
}

std::uint8_t apply_tagged_shift(EnvState& s, int z, Rng& reservoir_rng) {
  if (z != 1 && z != -1) throw ContractViolation("tagged shift must be +1 or -1");
  Segment& seg = s.segment();
  if (seg.occupied(z)) throw ContractViolation("tagged jump onto an occupied site");
  const double density = z == 1 ? s.rho_right() : s.lambda_left();
  const std::uint8_t entering = reservoir_rng.bernoulli(density) ? 1 : 0;
  const std::uint8_t dropped = seg.translate(z, entering);
  if (z == 1)
    ++s.counters().r;
  else
    ++s.counters().l;
  return dropped;
}

bool EnvReport::conserved() const {
  return initial_particles + created - destroyed + shifted_in - shifted_out == final_particles;
}

long replay_cut_count(const std::vector<EnvEvent>& log) {
  long n = 0;
  for (const auto& e : log) {
    if (e.kind != 'X') continue;
    if (e.a <= -1 && e.b >= 1) ++n;
    if (e.a >= 1 && e.b <= -1) --n;
  }
  return n;
}

EnvReport run_env(EnvState& s, const RateKernel& p, const TaggedKernel& q, const EnvRunOptions& opt, Rng& rng) {
  const int W = s.W();
  const int R = p.range();
  if (W < R) throw std::invalid_argument("env: window half-width must be at least the kernel range");
  if (!q.nearest_neighbor()) throw std::invalid_argument("env: the tagged kernel must be nearest-neighbor");
  if (opt.horizon < 0.0) throw std::invalid_argument("env: negative horizon");
  const double T = opt.horizon;
  const BatchGrid grid = opt.use_grid ? opt.grid : BatchGrid{0.0, T, 1};
  if (grid.end > T || grid.start < 0.0) throw std::invalid_argument("env: averaging window must lie in [0, T]");

  Segment& seg = s.segment();
  auto occ = [&seg](int x) { return seg.occupied(x); };

  std::vector<Tracked> tracked;
  for (const auto& c : opt.cylinders) {
    if (c.min_site() < -W || c.max_site() > W || c.uses_origin())
      throw std::invalid_argument("env: cylinder function " + c.name() + " needs sites in the window other than 0");
    tracked.push_back({c.name(), c.min_site(), c.max_site(), [c](const Segment& sg) {
                         return c.evaluate([&sg](int x) { return sg.occupied(x); });
                       }});
  }
  std::vector<CurrentSpec> counted;
  for (const auto& cs : opt.currents) {
    if (cs.j <= cs.i) throw std::invalid_argument("env: bond " + cs.name() + " needs i < j");
    if (cs.j - R < -W || cs.i + R > W)
      throw std::invalid_argument("env: bond " + cs.name() + " lies within the kernel range of the window edge");
    if (cs.mode == CurrentMode::kCounting) {
      counted.push_back(cs);
    } else {
      const int i = cs.i, j = cs.j;
      tracked.push_back({cs.name(), j - R, i + R, [&p, i, j](const Segment& sg) {
                           return instantaneous_current(sg, p, i, j);
                         }});
    }
  }

  std::vector<std::string> names;
  for (const auto& tr : tracked) names.push_back(tr.name);
  TimeAverager avg(names, grid);
  std::vector<std::vector<std::size_t>> by_site(static_cast<std::size_t>(2 * W + 1));
  for (std::size_t k = 0; k < tracked.size(); ++k)
    for (int x = std::max(tracked[k].lo, -W); x <= std::min(tracked[k].hi, W); ++x)
      by_site[static_cast<std::size_t>(x + W)].push_back(k);
  auto all_values = [&]() {
    std::vector<double> v;
    v.reserve(tracked.size());
    for (const auto& tr : tracked) v.push_back(tr.eval(seg));
    return v;
  };
  avg.reset_values(all_values(), 0.0);

  TallySeries tallies(counted.size() + 1, grid);
  const std::size_t cut_slot = counted.size();

  std::optional<TranslateTracker> density;
  if (opt.track_density) {
    density.emplace(std::vector<int>{0}, -W, 2 * W + 1, grid);
    density->reset(occ, 0.0);
  }

  EnvReport rep;
  rep.T = T;
  rep.initial_particles = seg.particle_count();

  const double lam = s.lambda_left(), rho = s.rho_right();
  auto monitor_site = [&](int x, double t) {
    if (!opt.boundary_monitor || rep.flagged) return;
    if (lam == 1.0 && x < -W + R && !seg.occupied(x)) {
      rep.flagged = true;
      rep.flag_reason = "site " + std::to_string(x) + " near the left edge vacated at t=" + std::to_string(t);
    } else if (rho == 0.0 && x > W - R && seg.occupied(x)) {
      rep.flagged = true;
      rep.flag_reason = "site " + std::to_string(x) + " near the right edge occupied at t=" + std::to_string(t);
    }
  };

  SegmentDynamics dyn(p, seg);
  RateTable& table = dyn.table();
  const std::size_t n = seg.slots();
  auto set_tagged = [&]() {
    table.set(n, seg.occupied(1) ? 0.0 : q(1));
    table.set(n + 1, seg.occupied(-1) ? 0.0 : q(-1));
  };
  set_tagged();

  auto site_changed = [&](int x, double t) {
    for (std::size_t k : by_site[static_cast<std::size_t>(x + W)]) avg.update(k, t, tracked[k].eval(seg));
    if (density) density->site_changed(occ, x, t);
    monitor_site(x, t);
  };

  Clock clock{0.0, rng};
  while (true) {
    const auto draw = sample_next(table, clock, opt.sampler);
    if (!draw || draw->time > T) break;
    const double t = draw->time;
    ++rep.events;
    if (draw->id >= n) {
      const int z = draw->id == n ? 1 : -1;
      const std::uint8_t dropped = apply_tagged_shift(s, z, clock.rng);
      const std::uint8_t entering = seg.occupied(z == 1 ? W : -W) ? 1 : 0;
      rep.shifted_in += entering;
      rep.shifted_out += dropped;
      if (opt.record_log) rep.log.push_back({t, 'S', z, entering, dropped});
      dyn.rebuild(seg);
      set_tagged();
      avg.accumulate(t, all_values());
      for (int x = -W; x <= W; ++x) {
        if (x == 0) continue;
        if (density) density->site_changed(occ, x, t);
        monitor_site(x, t);
      }
      continue;
    }
    const Move m = dyn.select(seg, draw->id, clock.rng.uniform());
    switch (m.kind) {
      case Move::Kind::kExchange: {
        apply_exchange(s, m.from, m.to);
        const int c = crossing(m, -1, 1);
        if (c != 0) tallies.add(cut_slot, t, c);
        for (std::size_t k = 0; k < counted.size(); ++k) {
          const int cc = crossing(m, counted[k].i, counted[k].j);
          if (cc != 0) tallies.add(k, t, cc);
        }
        if (opt.record_log) rep.log.push_back({t, 'X', m.from, m.to, 0});
        dyn.refresh_near(seg, m.from);
        dyn.refresh_near(seg, m.to);
        site_changed(m.from, t);
        site_changed(m.to, t);
        break;
      }
      case Move::Kind::kCreateLeft:
      case Move::Kind::kCreateRight:
        apply_move(seg, m);
        ++rep.created;
        if (opt.record_log) rep.log.push_back({t, 'C', m.from, 0, 0});
        dyn.refresh_near(seg, m.from);
        site_changed(m.from, t);
        break;
      case Move::Kind::kDestroyLeft:
      case Move::Kind::kDestroyRight:
        apply_move(seg, m);
        ++rep.destroyed;
        if (opt.record_log) rep.log.push_back({t, 'D', m.from, 0, 0});
        dyn.refresh_near(seg, m.from);
        site_changed(m.from, t);
        break;
    }
    set_tagged();
  }
  rng = clock.rng;

  avg.finalize(T);
  if (density) density->finalize(T);

  rep.counters = s.counters();
  rep.final_particles = seg.particle_count();
  std::size_t k_inst = opt.cylinders.size();
  for (std::size_t k = 0; k < opt.cylinders.size(); ++k)
    rep.cylinders.push_back({tracked[k].name, avg.average(k), avg.batch_means(k)});
  std::size_t k_count = 0;
  for (const auto& cs : opt.currents) {
    if (cs.mode == CurrentMode::kCounting) {
      rep.currents.push_back({cs.name(), tallies.rate(k_count), tallies.batch_rates(k_count)});
      ++k_count;
    } else {
      rep.currents.push_back({cs.name(), avg.average(k_inst), avg.batch_means(k_inst)});
      ++k_inst;
    }
  }
  rep.cut_current = {"C[-1,1]", tallies.rate(cut_slot), tallies.batch_rates(cut_slot)};
  if (density) rep.density = density->profile();
  return rep;
}

}  // namespace exclab
