#pragma once

// Exclusion dynamics on a finite segment of Z.
//
// Segment stores occupancy for sites lo..hi. When the origin is blocked the
// storage has no slot for site 0 and every rate enumeration skips it; jumps
// over the origin are still allowed and use their true displacement. The
// segment is closed either by Bernoulli reservoirs (creation/destruction at
// sites within the kernel range of an edge) or periodically.

#include <cstdint>
#include <span>
#include <vector>

#include "exclab/event_core.hpp"
#include "exclab/kernels.hpp"

namespace exclab {

enum class BoundaryKind { kReservoir, kPeriodic };

struct SegmentGeometry {
  int lo = 0;
  int hi = 0;
  bool origin_blocked = false;
  BoundaryKind boundary = BoundaryKind::kReservoir;
  double left_density = 0.0;   // reservoir density left of lo
  double right_density = 0.0;  // reservoir density right of hi

  int slot_count() const;
};

class Segment {
 public:
  Segment() = default;
  /// All sites vacant. Throws std::invalid_argument on hi < lo, densities
  /// outside [0, 1], or a periodic ring with a blocked origin.
  explicit Segment(SegmentGeometry g);

  const SegmentGeometry& geometry() const { return geom_; }
  int lo() const { return geom_.lo; }
  int hi() const { return geom_.hi; }
  std::size_t slots() const { return occ_.size(); }

  /// True iff x is a site of the segment (the blocked origin is not).
  bool contains(int x) const;
  std::size_t slot_of(int x) const;
  int site_of(std::size_t slot) const;

  /// False outside the segment and at the blocked origin.
  bool occupied(int x) const { return contains(x) && occ_[slot_of(x)] != 0; }
  void set(int x, bool v) { occ_[slot_of(x)] = v ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return occ_; }
  void assign(std::span<const std::uint8_t> bits);
  int particle_count() const;

  /// Shifts the configuration by one slot for a tagged jump to z = +1 or
  /// -1: new(x) = old(x + z) over the slot array, so the vacated site next to
  /// the origin takes old(z) (which must be vacant). `entering` fills the slot
  /// that opens at the far edge. Returns the occupancy that left the segment.
  std::uint8_t translate(int z, std::uint8_t entering);

 private:
  SegmentGeometry geom_;
  std::vector<std::uint8_t> occ_;
};

struct Move {
  enum class Kind : std::uint8_t { kExchange, kCreateLeft, kCreateRight, kDestroyLeft, kDestroyRight };
  Kind kind = Kind::kExchange;
  int from = 0;  // exchange source, or the created/destroyed site
  int to = 0;    // exchange target (same as `from` otherwise)
  int step = 0;  // signed jump displacement; differs from to - from across a periodic seam
};

struct RatedMove {
  Move move;
  double rate = 0.0;
};

/// Per-slot rates of a segment under a kernel. Each slot's entry is the sum
/// of every move that originates there (exchanges out of it, or its boundary
/// creation/destruction).
class SegmentDynamics {
 public:
  SegmentDynamics(RateKernel p, const Segment& seg);

  const RateKernel& kernel() const { return p_; }
  const RateTable& table() const { return table_; }
  RateTable& table() { return table_; }

  /// Recomputes every slot.
  void rebuild(const Segment& seg);
  /// Recomputes the slots whose rates can depend on site x.
  void refresh_near(const Segment& seg, int x);

  /// Rate of all moves originating at slot s.
  double slot_rate(const Segment& seg, std::size_t s) const;
  /// Every move with positive rate, in slot order. Brute-force view used by
  /// tests and by the exchange_rates operation.
  std::vector<RatedMove> enumerate(const Segment& seg) const;
  /// Picks the move at slot s whose cumulative rate exceeds u * slot_rate.
  Move select(const Segment& seg, std::size_t s, double u) const;

  /// Site reached from x by displacement d, honoring periodicity; returns
  /// false if the target is outside the segment or the blocked origin.
  bool target(const Segment& seg, int x, int d, int& y) const;

 private:
  template <class F>
  void for_each_move(const Segment& seg, std::size_t s, F&& f) const;

  RateKernel p_;
  int range_;
  RateTable table_;
};

/// Applies a move to the occupancy. Violated preconditions (source empty,
/// target full, wrong creation/destruction state) are a ContractViolation.
void apply_move(Segment& seg, const Move& m);

/// Net signed count of particles crossing the cut between i and j (i < j)
/// for an exchange on a non-periodic segment: +1 for from <= i, to >= j and
/// -1 for the mirror case. Boundary moves never cross.
int crossing(const Move& m, int i, int j);

struct TorusReport {
  long events = 0;
  long displacement = 0;  // sum of signed jump lengths
  double current = 0.0;   // displacement / (L * T): mean current per bond
};

/// Exclusion on the ring of L sites with exactly `particles` particles placed
/// uniformly at random, run to time T. Throws std::invalid_argument unless
/// 0 <= particles <= L and L > 2R.
TorusReport run_torus(int L, int particles, const RateKernel& p, double T, Rng& rng);

}  // namespace exclab
