#include "exclab/labeled_coupling.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace exclab {

namespace {

constexpr double kResidualTolerance = 1e-12;

long long ext_value(const LabeledState& s, long label) { return s.position(label); }

}  // namespace

LabeledState::LabeledState(long first_label, std::vector<int> positions, bool origin_blocked)
    : origin_blocked_(origin_blocked), first_(first_label), pos_(std::move(positions)) {
  validate();
}

LabeledState LabeledState::left_packed(long first_label, std::vector<int> positions, int packed_top,
                                       bool origin_blocked) {
  LabeledState s;
  s.mode_ = LabeledMode::kLeftPacked;
  s.origin_blocked_ = origin_blocked;
  s.first_ = first_label;
  s.pos_ = std::move(positions);
  s.packed_top_ = packed_top;
  s.validate();
  return s;
}

LabeledState LabeledState::step(int depth) {
  if (depth < 1) throw std::invalid_argument("labeled: step depth must be >= 1");
  std::vector<int> pos;
  for (int x = -depth; x <= -1; ++x) pos.push_back(x);
  return left_packed(-depth + 1, std::move(pos), -depth - 1, true);
}

void LabeledState::validate() const {
  for (std::size_t k = 1; k < pos_.size(); ++k)
    if (pos_[k] <= pos_[k - 1]) throw std::invalid_argument("labeled: positions must be strictly increasing");
  if (origin_blocked_ && std::binary_search(pos_.begin(), pos_.end(), 0))
    throw std::invalid_argument("labeled: site 0 is the tagged particle's seat");
  if (mode_ == LabeledMode::kLeftPacked) {
    if (!pos_.empty() && packed_top_ >= pos_.front())
      throw std::invalid_argument("labeled: the frozen block must lie below every tracked particle");
    if (origin_blocked_ && packed_top_ >= 0) throw std::invalid_argument("labeled: the frozen block covers site 0");
  }
}

int LabeledState::pos(long label) const {
  if (!tracks(label)) throw std::out_of_range("labeled: label " + std::to_string(label) + " is not tracked");
  return pos_[static_cast<std::size_t>(label - first_)];
}

long long LabeledState::position(long label) const {
  if (label > last_label()) return kPlusInf;
  if (label >= first_) return pos_[static_cast<std::size_t>(label - first_)];
  if (mode_ == LabeledMode::kFiniteCloud) return kMinusInf;
  return static_cast<long long>(packed_top_) - (first_ - 1 - label);
}

bool LabeledState::occupied(int x) const {
  if (mode_ == LabeledMode::kLeftPacked && x <= packed_top_) return true;
  return std::binary_search(pos_.begin(), pos_.end(), x);
}

bool LabeledState::can_move(long label, int z) const {
  return z != 0 && tracks(label) && is_hole(pos(label) + z);
}

std::optional<long> LabeledState::label_at(int x) const {
  if (mode_ == LabeledMode::kLeftPacked && x <= packed_top_) return first_ - 1 - (packed_top_ - x);
  const auto it = std::lower_bound(pos_.begin(), pos_.end(), x);
  if (it == pos_.end() || *it != x) return std::nullopt;
  return first_ + static_cast<long>(it - pos_.begin());
}

std::string LabeledState::to_string() const {
  std::ostringstream os;
  os << (mode_ == LabeledMode::kLeftPacked ? "packed" : "cloud") << " first=" << first_;
  if (mode_ == LabeledMode::kLeftPacked) os << " top=" << packed_top_;
  os << " [";
  for (std::size_t k = 0; k < pos_.size(); ++k) os << (k ? " " : "") << pos_[k];
  os << "]";
  return os.str();
}

LabeledState t_move(const LabeledState& s, long i, int z) {
  if (z == 0) return s;
  if (!s.can_move(i, z))
    throw ContractViolation("t_move: label " + std::to_string(i) + " cannot jump by " + std::to_string(z));
  LabeledState out = s;
  auto& p = out.pos_;
  const auto k = static_cast<std::size_t>(i - s.first_);
  const int target = p[k] + z;
  if (z > 0) {
    std::size_t m = k;
    while (m + 1 < p.size() && p[m + 1] < target) {
      p[m] = p[m + 1];
      ++m;
    }
    p[m] = target;
  } else {
    std::size_t m = k;
    while (m > 0 && p[m - 1] > target) {
      p[m] = p[m - 1];
      --m;
    }
    p[m] = target;
  }
  return out;
}

LabeledState theta_shift(const LabeledState& s, int z) {
  if (!s.can_shift(z))
    throw ContractViolation("theta_shift: site " + std::to_string(z) + " is occupied");
  LabeledState out = s;
  for (int& x : out.pos_) x -= z;
  out.packed_top_ -= z;
  return out;
}

LabeledState s_relabel(const LabeledState& s, long z) {
  LabeledState out = s;
  out.first_ -= z;
  return out;
}

LabeledState k_insert(const LabeledState& s, int x) {
  if (s.occupied(x)) return s;
  LabeledState out = s;
  out.pos_.insert(std::upper_bound(out.pos_.begin(), out.pos_.end(), x), x);
  out.first_ -= 1;
  return out;
}

LabeledState reverse(const LabeledState& s) {
  if (s.mode_ != LabeledMode::kFiniteCloud) throw std::invalid_argument("reverse: finite clouds only");
  LabeledState out = s;
  out.first_ = -s.last_label();
  std::reverse(out.pos_.begin(), out.pos_.end());
  for (int& x : out.pos_) x = -x;
  return out;
}

bool dominates(const LabeledState& upper, const LabeledState& lower) {
  const long lo = std::min(upper.first_label(), lower.first_label()) - 1;
  const long hi = std::max(upper.last_label(), lower.last_label()) + 1;
  for (long j = lo; j <= hi; ++j)
    if (ext_value(upper, j) < ext_value(lower, j)) return false;
  return true;
}

long f_count(const LabeledState& s) {
  const auto& p = s.positions();
  const auto below = std::upper_bound(p.begin(), p.end(), -1) - p.begin();
  return s.first_label() - 1 + static_cast<long>(below);
}

bool frozen_block_intact(const LabeledState& s, int R) {
  if (s.mode() != LabeledMode::kLeftPacked) return true;
  for (int x = s.packed_top() + 1; x <= s.packed_top() + R; ++x)
    if (!s.occupied(x) && !(s.origin_blocked() && x == 0)) return false;
  return true;
}

namespace {

// The hole-matching construction in coordinates where the leader jumps right.
// dir = +1: leader = lower, follower = upper. dir = -1: the mirror image, in
// which the leader is the reflected upper and the follower the reflected
// lower; site v of the mirrored picture is site -v of the real lattice.
int match_jump(const LabeledState& leader, const LabeledState& follower, long i, int z, int R, int dir) {
  if (z < 1 || z > R) throw ContractViolation("target_site: z must lie in 1..R");
  if (!leader.tracks(i) || !follower.tracks(i))
    throw ContractViolation("target_site: label " + std::to_string(i) + " must be tracked by both states");
  const int lead = dir * leader.pos(i);
  const int foll = dir * follower.pos(i);
  if (foll < lead) throw ContractViolation("target_site: states are not ordered at label " + std::to_string(i));
  if (!leader.is_hole(dir * (lead + z)))
    throw ContractViolation("target_site: the leading jump is not allowed");
  int holes[64];
  int n_holes = 0, k = -1;
  if (R > 64) throw ContractViolation("target_site: range too large");
  for (int v = lead + R; v > lead; --v) {
    if (!leader.is_hole(dir * v)) continue;
    if (v == lead + z) k = n_holes;
    holes[n_holes++] = v;
  }
  int prev = R + 1;
  for (int j = 0; j <= k; ++j) {
    int found = 0;
    for (int s = std::min(prev - 1, holes[j] - foll); s >= 1; --s) {
      if (follower.is_hole(dir * (foll + s))) {
        found = s;
        break;
      }
    }
    if (found == 0) return 0;
    prev = found;
  }
  return prev;
}

}  // namespace

int target_site(const LabeledState& upper, const LabeledState& lower, long i, int z, int R) {
  return match_jump(lower, upper, i, z, R, 1);
}

int target_site_left(const LabeledState& upper, const LabeledState& lower, long i, int z, int R) {
  return match_jump(upper, lower, i, z, R, -1);
}

std::string to_string(CouplingVariant v) {
  switch (v) {
    case CouplingVariant::kPlus: return "plus";
    case CouplingVariant::kFull: return "full";
    case CouplingVariant::kRight: return "right";
    case CouplingVariant::kLeft: return "left";
  }
  return "?";
}

CouplingVariant parse_variant(const std::string& name) {
  if (name == "plus") return CouplingVariant::kPlus;
  if (name == "full") return CouplingVariant::kFull;
  if (name == "right") return CouplingVariant::kRight;
  if (name == "left") return CouplingVariant::kLeft;
  throw std::invalid_argument("unknown coupling variant '" + name + "' (plus, full, right, left)");
}

const char* to_string(JointEvent::Kind k) {
  switch (k) {
    case JointEvent::Kind::kPaired: return "paired";
    case JointEvent::Kind::kSoloUpper: return "upper";
    case JointEvent::Kind::kSoloLower: return "lower";
    case JointEvent::Kind::kTaggedUpper: return "tagged-upper";
    case JointEvent::Kind::kTaggedLower: return "tagged-lower";
  }
  return "?";
}

std::vector<JointEvent> label_events(const CoupledState& c, const RateKernel& p, CouplingVariant v, long i) {
  using K = JointEvent::Kind;
  const LabeledState& X = c.upper;
  const LabeledState& Y = c.lower;
  const int R = p.range();
  const bool hx = X.tracks(i), hy = Y.tracks(i);
  std::vector<JointEvent> out;
  std::vector<double> mapped(static_cast<std::size_t>(R) + 1);

  auto direction = [&](int dir) {
    // dir = +1: lower leads right jumps, upper follows.
    // dir = -1: upper leads left jumps, lower follows.
    if (hx && hy) {
      std::fill(mapped.begin(), mapped.end(), 0.0);
      const LabeledState& leader = dir > 0 ? Y : X;
      const LabeledState& follower = dir > 0 ? X : Y;
      for (int z = 1; z <= R; ++z) {
        const double rate = p(dir * z);
        if (rate <= 0.0 || !leader.can_move(i, dir * z)) continue;
        const int s = match_jump(leader, follower, i, z, R, dir);
        if (dir > 0)
          out.push_back({K::kPaired, i, s, z, rate});
        else
          out.push_back({K::kPaired, i, -z, -s, rate});
        mapped[static_cast<std::size_t>(s)] += rate;
      }
      for (int s = 1; s <= R; ++s) {
        const double full = follower.can_move(i, dir * s) ? p(dir * s) : 0.0;
        const double residual = full - mapped[static_cast<std::size_t>(s)];
        if (residual < -kResidualTolerance)
          throw ContractViolation("joint rates: negative residual " + std::to_string(residual) + " at label " +
                                  std::to_string(i) + ", s=" + std::to_string(dir * s));
        if (residual <= 0.0) continue;
        if (dir > 0)
          out.push_back({K::kSoloUpper, i, s, 0, residual});
        else
          out.push_back({K::kSoloLower, i, 0, -s, residual});
      }
      return;
    }
    for (int s = 1; s <= R; ++s) {
      const double rate = p(dir * s);
      if (rate <= 0.0) continue;
      if (hx && X.can_move(i, dir * s)) out.push_back({K::kSoloUpper, i, dir * s, 0, rate});
      if (hy && Y.can_move(i, dir * s)) out.push_back({K::kSoloLower, i, 0, dir * s, rate});
    }
  };
  direction(1);
  if (v != CouplingVariant::kPlus) direction(-1);
  return out;
}

namespace {

void tagged_events(const CoupledState& c, const TaggedKernel& q, CouplingVariant v, std::vector<JointEvent>& out) {
  using K = JointEvent::Kind;
  if (v != CouplingVariant::kRight && v != CouplingVariant::kLeft) return;
  const LabeledState& s = v == CouplingVariant::kRight ? c.upper : c.lower;
  const K kind = v == CouplingVariant::kRight ? K::kTaggedUpper : K::kTaggedLower;
  for (const auto& [y, rate] : q.rates()) {
    if (rate <= 0.0 || !s.can_shift(y)) continue;
    JointEvent e{kind, 0, 0, 0, rate};
    (kind == K::kTaggedUpper ? e.du : e.dl) = y;
    out.push_back(e);
  }
}

// Tagged jump y under the rule of the given generator.
LabeledState tagged_jump(const LabeledState& s, int y, LabeledGenerator g) {
  const LabeledState shifted = theta_shift(s, y);
  if ((g == LabeledGenerator::kRightShift && y > 0) || (g == LabeledGenerator::kLeftShift && y < 0))
    return s_relabel(shifted, y);
  return shifted;
}

int cut_crossing(int from, int to) {
  if (from <= -1 && to >= 1) return 1;
  if (from >= 1 && to <= -1) return -1;
  return 0;
}

// Moves label i by z and returns the net cut crossing.
int move_label(LabeledState& s, long i, int z) {
  if (z == 0) return 0;
  const int from = s.pos(i);
  s = t_move(s, i, z);
  return cut_crossing(from, from + z);
}

void count_tagged(LabeledCounters& c, int y) {
  if (y > 0)
    ++c.r;
  else
    ++c.l;
}

}  // namespace

std::vector<JointEvent> joint_rates(const CoupledState& c, const RateKernel& p, const TaggedKernel& q,
                                    CouplingVariant v) {
  std::vector<JointEvent> out;
  const long lo = std::min(c.upper.first_label(), c.lower.first_label());
  const long hi = std::max(c.upper.last_label(), c.lower.last_label());
  for (long i = lo; i <= hi; ++i) {
    auto ev = label_events(c, p, v, i);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  tagged_events(c, q, v, out);
  return out;
}

void apply_joint(CoupledState& c, const JointEvent& e) {
  using K = JointEvent::Kind;
  switch (e.kind) {
    case K::kPaired:
    case K::kSoloUpper:
    case K::kSoloLower:
      if (e.du != 0) c.upper = t_move(c.upper, e.label, e.du);
      if (e.dl != 0) c.lower = t_move(c.lower, e.label, e.dl);
      break;
    case K::kTaggedUpper:
      c.upper = tagged_jump(c.upper, e.du, LabeledGenerator::kRightShift);
      break;
    case K::kTaggedLower:
      c.lower = tagged_jump(c.lower, e.dl, LabeledGenerator::kLeftShift);
      break;
  }
}

std::string format_log_line(const CoupledLogLine& line) {
  using K = JointEvent::Kind;
  const JointEvent& e = line.event;
  std::ostringstream os;
  os.precision(17);
  const int z = e.kind == K::kTaggedUpper ? e.du : e.dl;
  const int s = e.kind == K::kTaggedUpper || e.kind == K::kTaggedLower ? 0 : e.du;
  os << line.t << ',' << to_string(e.kind) << ',' << e.label << ',' << z << ',' << s;
  return os.str();
}

namespace {

void check_run_inputs(const RateKernel& p, const TaggedKernel& q, bool tagged, const LabeledState& a,
                      const LabeledState* b, double horizon) {
  if (horizon < 0.0) throw std::invalid_argument("labeled: negative horizon");
  class_c_decompose(p);
  if (p.range() > 64) throw std::invalid_argument("labeled: kernel range above 64 is not supported");
  if (tagged) {
    if (!q.nearest_neighbor()) throw std::invalid_argument("labeled: the tagged kernel must be nearest-neighbor");
    if (!a.origin_blocked() || (b && !b->origin_blocked()))
      throw std::invalid_argument("labeled: tagged dynamics need the origin blocked");
  }
  if (b && a.origin_blocked() != b->origin_blocked())
    throw std::invalid_argument("labeled: both states must agree on the blocked origin");
}

long long displacement(const LabeledState& start, const LabeledState& end, long label) {
  const long long a = start.position(label), b = end.position(label);
  if (a == LabeledState::kMinusInf || a == LabeledState::kPlusInf || b == LabeledState::kMinusInf ||
      b == LabeledState::kPlusInf)
    return LabeledState::kMinusInf;
  return b - a;
}

// Labels whose position in s lies within R of [a, b].
void labels_near(const LabeledState& s, int a, int b, int R, std::vector<long>& out) {
  const auto& p = s.positions();
  auto it = std::lower_bound(p.begin(), p.end(), std::min(a, b) - R);
  for (; it != p.end() && *it <= std::max(a, b) + R; ++it) out.push_back(s.first_label() + (it - p.begin()));
}

}  // namespace

CoupledReport coupled_run(CoupledState& c, const RateKernel& p, const TaggedKernel& q, CouplingVariant v,
                          const CoupledRunOptions& opt, Rng& rng) {
  using K = JointEvent::Kind;
  const bool tagged = v == CouplingVariant::kRight || v == CouplingVariant::kLeft;
  check_run_inputs(p, q, tagged && !q.is_zero(), c.upper, &c.lower, opt.horizon);
  if (!dominates(c.upper, c.lower)) throw std::invalid_argument("coupled_run: the initial pair is not ordered");
  const int R = p.range();
  const CoupledState start = c;

  CoupledReport rep;
  rep.upper.f0 = f_count(c.upper);
  rep.lower.f0 = f_count(c.lower);

  RateTable table;
  std::vector<std::vector<JointEvent>> by_label;
  long base = 0;
  std::size_t n_labels = 0;
  auto refresh_label = [&](long i) {
    const auto id = static_cast<std::size_t>(i - base);
    if (i < base || id >= n_labels) return;
    by_label[id] = label_events(c, p, v, i);
    double total = 0.0;
    for (const auto& e : by_label[id]) total += e.rate;
    table.set(id, total);
  };
  std::vector<JointEvent> tagged_list;
  auto refresh_tagged = [&]() {
    tagged_list.clear();
    tagged_events(c, q, v, tagged_list);
    double total = 0.0;
    for (const auto& e : tagged_list) total += e.rate;
    table.set(n_labels, total);
  };
  auto rebuild = [&]() {
    base = std::min(c.upper.first_label(), c.lower.first_label());
    const long hi = std::max(c.upper.last_label(), c.lower.last_label());
    n_labels = static_cast<std::size_t>(std::max(0L, hi - base + 1));
    table = RateTable(n_labels + 1);
    by_label.assign(n_labels, {});
    for (long i = base; i <= hi; ++i) refresh_label(i);
    refresh_tagged();
  };
  rebuild();

  std::vector<long> dirty;
  Clock clock{0.0, rng};
  while (true) {
    const auto draw = sample_next(table, clock);
    if (!draw || draw->time > opt.horizon) break;
    const std::vector<JointEvent>& list = draw->id == n_labels ? tagged_list : by_label[draw->id];
    double u = clock.rng.uniform() * table.rate(draw->id);
    std::size_t pick = 0;
    while (pick + 1 < list.size() && u >= list[pick].rate) u -= list[pick++].rate;
    if (list.empty()) throw ContractViolation("coupled_run: selected an empty event list");
    const JointEvent e = list[pick];
    ++rep.events;
    if (opt.record_log) rep.log.push_back({draw->time, e});

    if (e.kind == K::kTaggedUpper || e.kind == K::kTaggedLower) {
      apply_joint(c, e);
      if (e.kind == K::kTaggedUpper)
        count_tagged(rep.upper.counters, e.du);
      else
        count_tagged(rep.lower.counters, e.dl);
      rebuild();
    } else {
      dirty.clear();
      if (e.du != 0) {
        const int from = c.upper.pos(e.label);
        rep.upper.counters.N += move_label(c.upper, e.label, e.du);
        labels_near(c.upper, from, from + e.du, R, dirty);
      }
      if (e.dl != 0) {
        const int from = c.lower.pos(e.label);
        rep.lower.counters.N += move_label(c.lower, e.label, e.dl);
        labels_near(c.lower, from, from + e.dl, R, dirty);
      }
      std::sort(dirty.begin(), dirty.end());
      dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
      for (long i : dirty) refresh_label(i);
      refresh_tagged();
    }
    if (!frozen_block_intact(c.upper, R) || !frozen_block_intact(c.lower, R)) rep.flagged = true;
    if (opt.audit) {
      ++rep.order_checks;
      if (!dominates(c.upper, c.lower)) {
        rep.violation = true;
        std::ostringstream os;
        os << "order violated after event " << rep.events << " (" << format_log_line({draw->time, e})
           << ")\n  upper: " << c.upper.to_string() << "\n  lower: " << c.lower.to_string();
        rep.diagnostic = os.str();
        break;
      }
    }
  }
  rng = clock.rng;

  rep.upper.fT = f_count(c.upper);
  rep.lower.fT = f_count(c.lower);
  rep.upper.displacement = displacement(start.upper, c.upper, opt.tracked_label);
  rep.lower.displacement = displacement(start.lower, c.lower, opt.tracked_label);
  rep.upper.flagged = rep.lower.flagged = rep.flagged;
  return rep;
}

LabeledSummary run_labeled(LabeledState& s, const RateKernel& p, const TaggedKernel& q, LabeledGenerator g,
                           double horizon, long tracked_label, Rng& rng) {
  check_run_inputs(p, q, !q.is_zero(), s, nullptr, horizon);
  const LabeledState start = s;
  const int R = p.range();
  LabeledSummary out;
  out.f0 = f_count(s);

  struct Ev {
    long label;
    int z;  // label move, or tagged jump when label is unused
    bool tagged;
    double rate;
  };
  std::vector<Ev> events;
  Clock clock{0.0, rng};
  while (true) {
    events.clear();
    double total = 0.0;
    for (long i = s.first_label(); i <= s.last_label(); ++i)
      for (const auto& [z, rate] : p.rates())
        if (s.can_move(i, z)) {
          events.push_back({i, z, false, rate});
          total += rate;
        }
    for (const auto& [y, rate] : q.rates())
      if (rate > 0.0 && s.can_shift(y)) {
        events.push_back({0, y, true, rate});
        total += rate;
      }
    if (total <= 0.0) break;
    clock.now += clock.rng.exponential(total);
    if (clock.now > horizon) break;
    double u = clock.rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < events.size() && u >= events[k].rate) u -= events[k++].rate;
    const Ev& e = events[k];
    if (e.tagged) {
      s = tagged_jump(s, e.z, g);
      count_tagged(out.counters, e.z);
    } else {
      out.counters.N += move_label(s, e.label, e.z);
    }
    if (!frozen_block_intact(s, R)) out.flagged = true;
  }
  rng = clock.rng;
  out.fT = f_count(s);
  out.displacement = displacement(start, s, tracked_label);
  return out;
}

LabeledState random_cloud(Rng& rng, int n, int lo, int hi, long first_label, bool origin_blocked) {
  std::vector<int> sites;
  for (int x = lo; x <= hi; ++x)
    if (!(origin_blocked && x == 0)) sites.push_back(x);
  if (n < 0 || static_cast<std::size_t>(n) > sites.size())
    throw std::invalid_argument("random_cloud: not enough sites for " + std::to_string(n) + " particles");
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    const std::size_t j = k + rng.below(sites.size() - k);
    std::swap(sites[k], sites[j]);
  }
  sites.resize(static_cast<std::size_t>(n));
  std::sort(sites.begin(), sites.end());
  return LabeledState(first_label, std::move(sites), origin_blocked);
}

namespace {

// Random increasing moves: right jumps and label-shifted translations, each
// of which can only raise the state in the componentwise order.
void raise_randomly(Rng& rng, LabeledState& s, int moves, int R) {
  for (int k = 0; k < moves && !s.empty(); ++k) {
    if (s.origin_blocked() && rng.bernoulli(0.1)) {
      const int z = 1 + static_cast<int>(rng.below(2));
      if (s.can_shift(z)) s = s_relabel(theta_shift(s, z), z);
      continue;
    }
    const long i = s.first_label() + static_cast<long>(rng.below(s.size()));
    const int z = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(R)));
    if (s.can_move(i, z)) s = t_move(s, i, z);
  }
}

}  // namespace

CoupledState random_ordered_pair(Rng& rng, int n, int lo, int hi, int R, bool origin_blocked) {
  CoupledState c;
  c.lower = random_cloud(rng, n, lo, hi, 0, origin_blocked);
  c.upper = c.lower;
  raise_randomly(rng, c.upper, static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * n + 1))), R);
  return c;
}

CoupledState random_packed_pair(Rng& rng, int depth, int R) {
  CoupledState c;
  c.lower = LabeledState::step(depth);
  const int warm = static_cast<int>(rng.below(static_cast<std::uint64_t>(depth + 1)));
  for (int k = 0; k < warm; ++k) {
    const long i = c.lower.first_label() + static_cast<long>(rng.below(c.lower.size()));
    const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * R + 1))) - R;
    if (c.lower.can_move(i, z) && c.lower.pos(i) + z > c.lower.packed_top()) c.lower = t_move(c.lower, i, z);
  }
  c.upper = c.lower;
  raise_randomly(rng, c.upper, static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * depth + 1))), R);
  return c;
}

}  // namespace exclab
