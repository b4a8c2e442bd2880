#include "exclab/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace exclab {

int SegmentGeometry::slot_count() const {
  const int n = hi - lo + 1;
  return (origin_blocked && lo <= 0 && hi >= 0) ? n - 1 : n;
}

Segment::Segment(SegmentGeometry g) : geom_(g) {
  if (g.hi < g.lo) throw std::invalid_argument("segment: hi < lo");
  if (g.left_density < 0.0 || g.left_density > 1.0 || g.right_density < 0.0 || g.right_density > 1.0)
    throw std::invalid_argument("segment: reservoir densities must lie in [0, 1]");
  if (g.boundary == BoundaryKind::kPeriodic && g.origin_blocked)
    throw std::invalid_argument("segment: a periodic ring cannot block the origin");
  occ_.assign(static_cast<std::size_t>(g.slot_count()), 0);
}

bool Segment::contains(int x) const {
  if (x < geom_.lo || x > geom_.hi) return false;
  return !(geom_.origin_blocked && x == 0);
}

std::size_t Segment::slot_of(int x) const {
  int s = x - geom_.lo;
  if (geom_.origin_blocked && x > 0 && geom_.lo <= 0) --s;
  return static_cast<std::size_t>(s);
}

int Segment::site_of(std::size_t slot) const {
  int x = geom_.lo + static_cast<int>(slot);
  if (geom_.origin_blocked && geom_.lo <= 0 && x >= 0) ++x;
  return x;
}

void Segment::assign(std::span<const std::uint8_t> bits) {
  if (bits.size() != occ_.size())
    throw std::invalid_argument("segment: expected " + std::to_string(occ_.size()) + " occupancy bits, got " +
                                std::to_string(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) occ_[i] = bits[i] ? 1 : 0;
}

int Segment::particle_count() const {
  int n = 0;
  for (auto b : occ_) n += b;
  return n;
}

std::uint8_t Segment::translate(int z, std::uint8_t entering) {
  if (!geom_.origin_blocked || geom_.lo > -1 || geom_.hi < 1)
    throw ContractViolation("segment: translate needs a blocked origin inside the segment");
  if (occupied(z)) throw ContractViolation("segment: tagged jump onto an occupied site");
  std::uint8_t dropped = 0;
  if (z == 1) {
    dropped = occ_.front();
    std::rotate(occ_.begin(), occ_.begin() + 1, occ_.end());
    occ_.back() = entering ? 1 : 0;
  } else if (z == -1) {
    dropped = occ_.back();
    std::rotate(occ_.rbegin(), occ_.rbegin() + 1, occ_.rend());
    occ_.front() = entering ? 1 : 0;
  } else {
    throw ContractViolation("segment: translate supports nearest-neighbor shifts only");
  }
  return dropped;
}

SegmentDynamics::SegmentDynamics(RateKernel p, const Segment& seg)
    : p_(std::move(p)), range_(p_.range()), table_(seg.slots()) {
  const auto& g = seg.geometry();
  if (g.boundary == BoundaryKind::kPeriodic && (g.hi - g.lo + 1) <= 2 * range_)
    throw std::invalid_argument("segment: periodic ring must be longer than twice the kernel range");
  rebuild(seg);
}

bool SegmentDynamics::target(const Segment& seg, int x, int d, int& y) const {
  const auto& g = seg.geometry();
  if (g.boundary == BoundaryKind::kPeriodic) {
    const int L = g.hi - g.lo + 1;
    y = g.lo + ((x - g.lo + d) % L + L) % L;
    return true;
  }
  y = x + d;
  return seg.contains(y);
}

template <class F>
void SegmentDynamics::for_each_move(const Segment& seg, std::size_t s, F&& f) const {
  const int x = seg.site_of(s);
  const auto& g = seg.geometry();
  const bool occ = seg.occupied(x);
  const bool reservoir = g.boundary == BoundaryKind::kReservoir;
  if (occ) {
    for (const auto& [d, rate] : p_.rates()) {
      int y;
      if (target(seg, x, d, y) && !seg.occupied(y)) f(Move{Move::Kind::kExchange, x, y, d}, rate);
    }
    if (reservoir) {
      // Exits to reservoir sites x' < lo (or > hi), weighted by their vacancy.
      if (g.left_density < 1.0) {
        double r = 0.0;
        for (int d = x - g.lo + 1; d <= range_; ++d) r += p_(-d);
        if (r > 0.0) f(Move{Move::Kind::kDestroyLeft, x, x, 0}, r * (1.0 - g.left_density));
      }
      if (g.right_density < 1.0) {
        double r = 0.0;
        for (int d = g.hi - x + 1; d <= range_; ++d) r += p_(d);
        if (r > 0.0) f(Move{Move::Kind::kDestroyRight, x, x, 0}, r * (1.0 - g.right_density));
      }
    }
  } else if (reservoir) {
    if (g.left_density > 0.0) {
      double r = 0.0;
      for (int d = x - g.lo + 1; d <= range_; ++d) r += p_(d);
      if (r > 0.0) f(Move{Move::Kind::kCreateLeft, x, x, 0}, r * g.left_density);
    }
    if (g.right_density > 0.0) {
      double r = 0.0;
      for (int d = g.hi - x + 1; d <= range_; ++d) r += p_(-d);
      if (r > 0.0) f(Move{Move::Kind::kCreateRight, x, x, 0}, r * g.right_density);
    }
  }
}

double SegmentDynamics::slot_rate(const Segment& seg, std::size_t s) const {
  double total = 0.0;
  for_each_move(seg, s, [&](const Move&, double r) { total += r; });
  return total;
}

void SegmentDynamics::rebuild(const Segment& seg) {
  for (std::size_t s = 0; s < seg.slots(); ++s) table_.set(s, slot_rate(seg, s));
}

void SegmentDynamics::refresh_near(const Segment& seg, int x) {
  for (int d = -range_; d <= range_; ++d) {
    int y;
    if (target(seg, x, d, y)) table_.set(seg.slot_of(y), slot_rate(seg, seg.slot_of(y)));
  }
}

std::vector<RatedMove> SegmentDynamics::enumerate(const Segment& seg) const {
  std::vector<RatedMove> out;
  for (std::size_t s = 0; s < seg.slots(); ++s)
    for_each_move(seg, s, [&](const Move& m, double r) { out.push_back({m, r}); });
  return out;
}

Move SegmentDynamics::select(const Segment& seg, std::size_t s, double u) const {
  const double target_mass = u * slot_rate(seg, s);
  double acc = 0.0;
  Move chosen;
  bool found = false;
  bool any = false;
  for_each_move(seg, s, [&](const Move& m, double r) {
    if (found) return;
    any = true;
    chosen = m;
    acc += r;
    if (acc > target_mass) found = true;
  });
  if (!any) throw ContractViolation("segment: selected a slot without moves");
  return chosen;
}

void apply_move(Segment& seg, const Move& m) {
  switch (m.kind) {
    case Move::Kind::kExchange:
      if (!seg.occupied(m.from) || !seg.contains(m.to) || seg.occupied(m.to))
        throw ContractViolation("exchange: need an occupied source and a vacant target");
      seg.set(m.from, false);
      seg.set(m.to, true);
      return;
    case Move::Kind::kCreateLeft:
    case Move::Kind::kCreateRight:
      if (seg.occupied(m.from)) throw ContractViolation("creation on an occupied site");
      seg.set(m.from, true);
      return;
    case Move::Kind::kDestroyLeft:
    case Move::Kind::kDestroyRight:
      if (!seg.occupied(m.from)) throw ContractViolation("destruction on a vacant site");
      seg.set(m.from, false);
      return;
  }
}

int crossing(const Move& m, int i, int j) {
  if (m.kind != Move::Kind::kExchange) return 0;
  if (m.from <= i && m.to >= j) return 1;
  if (m.from >= j && m.to <= i) return -1;
  return 0;
}

TorusReport run_torus(int L, int particles, const RateKernel& p, double T, Rng& rng) {
  if (particles < 0 || particles > L) throw std::invalid_argument("torus: particle count must lie in [0, L]");
  if (T < 0.0) throw std::invalid_argument("torus: negative horizon");
  SegmentGeometry g;
  g.lo = 0;
  g.hi = L - 1;
  g.boundary = BoundaryKind::kPeriodic;
  Segment seg(g);
  std::vector<int> sites(static_cast<std::size_t>(L));
  for (int x = 0; x < L; ++x) sites[static_cast<std::size_t>(x)] = x;
  for (int k = 0; k < particles; ++k) {
    const auto j = static_cast<std::size_t>(k) + rng.below(static_cast<std::uint64_t>(L - k));
    std::swap(sites[static_cast<std::size_t>(k)], sites[j]);
    seg.set(sites[static_cast<std::size_t>(k)], true);
  }
  SegmentDynamics dyn(p, seg);
  dyn.rebuild(seg);
  TorusReport rep;
  Clock clock{0.0, rng};
  while (true) {
    const auto draw = sample_next(dyn.table(), clock);
    if (!draw || draw->time > T) break;
    const Move m = dyn.select(seg, draw->id, clock.rng.uniform());
    apply_move(seg, m);
    rep.displacement += m.step;
    ++rep.events;
    dyn.refresh_near(seg, m.from);
    dyn.refresh_near(seg, m.to);
  }
  rng = clock.rng;
  rep.current = T > 0.0 ? static_cast<double>(rep.displacement) / (static_cast<double>(L) * T) : 0.0;
  return rep;
}

}  // namespace exclab
