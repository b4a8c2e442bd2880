#pragma once

// The labeled process: particle positions X_i indexed by integer labels and
// strictly increasing in the label. A finite state tracks labels
// first_label .. first_label + size - 1; every other label sits at a
// sentinel. In a finite cloud, labels below the range are at -infinity and
// labels above at +infinity. In a left-packed state, labels below the range
// fill every site up to packed_top (a frozen block) and labels above are at
// +infinity.
//
// Maps (all return new states):
//   t_move(s, i, z)    particle i jumps by z; the position set loses X_i and
//                      gains X_i + z, and labels are re-sorted over the same
//                      label range
//   theta_shift(s, z)  every position decreases by z (tagged jump by z)
//   s_relabel(s, z)    label j takes the position of old label j + z
//   k_insert(s, x)     a particle is added at x; it takes the largest label
//                      whose old position was <= x and lower labels move down

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exclab/event_core.hpp"
#include "exclab/kernels.hpp"

namespace exclab {

enum class LabeledMode { kFiniteCloud, kLeftPacked };

class LabeledState {
 public:
  static constexpr long long kMinusInf = std::numeric_limits<long long>::min();
  static constexpr long long kPlusInf = std::numeric_limits<long long>::max();

  LabeledState() = default;
  /// Finite cloud. Throws std::invalid_argument unless positions are
  /// strictly increasing and, with a blocked origin, avoid site 0.
  LabeledState(long first_label, std::vector<int> positions, bool origin_blocked = false);
  /// Left-packed state; additionally needs packed_top < positions.front().
  static LabeledState left_packed(long first_label, std::vector<int> positions, int packed_top,
                                  bool origin_blocked = false);
  /// Left-packed step configuration: label i at site i - 1 for the `depth`
  /// tracked labels i = -depth+1 .. 0, the frozen block below, origin blocked.
  static LabeledState step(int depth);

  LabeledMode mode() const { return mode_; }
  bool origin_blocked() const { return origin_blocked_; }
  long first_label() const { return first_; }
  long last_label() const { return first_ + static_cast<long>(pos_.size()) - 1; }
  std::size_t size() const { return pos_.size(); }
  bool empty() const { return pos_.empty(); }
  bool tracks(long label) const { return label >= first_ && label <= last_label(); }
  const std::vector<int>& positions() const { return pos_; }
  int packed_top() const { return packed_top_; }

  /// Position of a tracked label.
  int pos(long label) const;
  /// Position of any label, with kMinusInf / kPlusInf sentinels.
  long long position(long label) const;
  /// Occupied by a tracked particle or the frozen block.
  bool occupied(int x) const;
  /// x can receive a particle: vacant and not the blocked origin.
  bool is_hole(int x) const { return !occupied(x) && !(origin_blocked_ && x == 0); }
  /// Condition A_{i,z}: label i is tracked, z != 0 and X_i + z is a hole.
  bool can_move(long label, int z) const;
  /// Condition B_z: site z is not occupied.
  bool can_shift(int z) const { return !occupied(z); }
  std::optional<long> label_at(int x) const;

  bool operator==(const LabeledState&) const = default;
  std::string to_string() const;

 private:
  friend LabeledState t_move(const LabeledState&, long, int);
  friend LabeledState theta_shift(const LabeledState&, int);
  friend LabeledState s_relabel(const LabeledState&, long);
  friend LabeledState k_insert(const LabeledState&, int);
  friend LabeledState reverse(const LabeledState&);
  void validate() const;

  LabeledMode mode_ = LabeledMode::kFiniteCloud;
  bool origin_blocked_ = false;
  long first_ = 0;
  std::vector<int> pos_;
  int packed_top_ = 0;
};

/// Throws ContractViolation unless A_{i,z} holds. z = 0 is the identity.
LabeledState t_move(const LabeledState& s, long i, int z);
/// Throws ContractViolation unless B_z holds.
LabeledState theta_shift(const LabeledState& s, int z);
LabeledState s_relabel(const LabeledState& s, long z);
/// Identity when x is occupied.
LabeledState k_insert(const LabeledState& s, int x);
/// Mirror image: label i of the result sits at -X_{-i}. Finite clouds only
/// (throws std::invalid_argument for a left-packed state).
LabeledState reverse(const LabeledState& s);

/// Componentwise order upper_i >= lower_i over every label, sentinels
/// included.
bool dominates(const LabeledState& upper, const LabeledState& lower);

/// F = max{i : X_i <= -1}.
long f_count(const LabeledState& s);

/// Left-packed states only: true when the R sites above the frozen block are
/// all occupied, i.e. no block particle could have moved. Finite clouds
/// always pass.
bool frozen_block_intact(const LabeledState& s, int R);

/// The follower displacement z' >= 0 matched to a jump of `lower`'s label i
/// by z > 0, for upper >= lower. Post conditions: t_move(upper, i, z') >=
/// t_move(lower, i, z), and z' = 0 or upper_i + z' <= lower_i + z. Throws
/// ContractViolation if upper_i < lower_i, z is outside 1..R, or A_{i,z}
/// fails for lower.
int target_site(const LabeledState& upper, const LabeledState& lower, long i, int z, int R);
/// The same construction on the mirrored lattice: `upper`'s label i jumps
/// left by z and the returned s >= 0 is the matching left jump of `lower`.
int target_site_left(const LabeledState& upper, const LabeledState& lower, long i, int z, int R);

enum class CouplingVariant { kPlus, kFull, kRight, kLeft };
std::string to_string(CouplingVariant v);
/// Accepts "plus", "full", "right", "left".
CouplingVariant parse_variant(const std::string& name);

struct CoupledState {
  LabeledState upper;
  LabeledState lower;
};

struct JointEvent {
  enum class Kind : std::uint8_t { kPaired, kSoloUpper, kSoloLower, kTaggedUpper, kTaggedLower };
  Kind kind = Kind::kPaired;
  long label = 0;
  int du = 0;  // upper displacement (tagged-upper: the tagged jump y)
  int dl = 0;  // lower displacement (tagged-lower: the tagged jump y)
  double rate = 0.0;
};
const char* to_string(JointEvent::Kind k);

/// Every joint transition out of c with positive rate.
///
/// Right jumps: for each label tracked by both, lower jumps by z at rate
/// p(z) paired with the upper jump target_site(...), and the upper keeps
/// residual solo rates p(s) - sum of paired rates mapped to s. Left jumps
/// (all variants but kPlus) mirror this with the upper leading. A label
/// tracked by only one process moves alone at full rate. kRight adds tagged
/// jumps of the upper (Theta_y for y < 0, S_y Theta_y for y > 0); kLeft adds
/// tagged jumps of the lower (Theta_y for y > 0, S_y Theta_y for y < 0).
/// A residual below -1e-12 is a ContractViolation.
std::vector<JointEvent> joint_rates(const CoupledState& c, const RateKernel& p, const TaggedKernel& q,
                                    CouplingVariant v);
/// Events of one label only (the building block of joint_rates).
std::vector<JointEvent> label_events(const CoupledState& c, const RateKernel& p, CouplingVariant v, long label);

/// Applies a joint event to the pair.
void apply_joint(CoupledState& c, const JointEvent& e);

/// Which generator a single labeled process follows.
enum class LabeledGenerator { kPlain, kRightShift, kLeftShift };

/// Per-process tallies: red crossings of the cut (-1, 1) and tagged jumps.
struct LabeledCounters {
  long N = 0;
  long r = 0;
  long l = 0;
};

struct LabeledSummary {
  long f0 = 0;
  long fT = 0;
  LabeledCounters counters;
  long long displacement = 0;  // of the tracked label; sentinel when untracked at either end
  bool flagged = false;        // a frozen block became exposed
};

struct CoupledRunOptions {
  double horizon = 0.0;
  bool record_log = false;
  long tracked_label = 0;
  bool audit = true;  // order check after every event
};

struct CoupledLogLine {
  double t = 0.0;
  JointEvent event;
};

struct CoupledReport {
  long events = 0;
  long order_checks = 0;
  bool violation = false;
  std::string diagnostic;
  bool flagged = false;  // a frozen block became exposed (see frozen_block_intact)
  LabeledSummary upper;
  LabeledSummary lower;
  std::vector<CoupledLogLine> log;
};

/// Simulates the joint chain to options.horizon. Throws std::invalid_argument
/// unless the initial pair is ordered and the kernel is class C; a tagged
/// variant also needs a nearest-neighbor q and blocked origins. An order
/// violation stops the run with report.violation set and the states left as
/// they were after the offending event.
CoupledReport coupled_run(CoupledState& c, const RateKernel& p, const TaggedKernel& q, CouplingVariant v,
                          const CoupledRunOptions& options, Rng& rng);

/// Standalone simulation of one labeled process under the given generator.
LabeledSummary run_labeled(LabeledState& s, const RateKernel& p, const TaggedKernel& q, LabeledGenerator g,
                           double horizon, long tracked_label, Rng& rng);

/// Random finite cloud of n particles on distinct sites in [lo, hi] (site 0
/// avoided when blocked), first label `first_label`.
LabeledState random_cloud(Rng& rng, int n, int lo, int hi, long first_label, bool origin_blocked);
/// A random lower cloud and an upper obtained from it by random right moves
/// and label-shifted translations, so upper >= lower.
CoupledState random_ordered_pair(Rng& rng, int n, int lo, int hi, int R, bool origin_blocked);

/// Left-packed analogue: the lower state is the step configuration of the
/// given depth after a few random jumps; the upper is obtained from it as in
/// random_ordered_pair.
CoupledState random_packed_pair(Rng& rng, int depth, int R);

/// Event log line "time,event-kind,label,z,s" (z: lower displacement or
/// tagged jump, s: upper displacement).
std::string format_log_line(const CoupledLogLine& line);

}  // namespace exclab
