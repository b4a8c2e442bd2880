#pragma once

// The environment process: the configuration of red particles seen from the
// tagged particle, which always sits at site 0. Red particles exchange with
// holes at rates p(y - x) for x, y != 0; a tagged jump by z shifts the whole
// configuration by -z. With q == 0 this is the exclusion process with a
// blockage at the origin.
//
// The window -W..W is closed by Bernoulli reservoirs of densities lambda_left
// and rho_right, which also supply the site entering the window on a tagged
// shift.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exclab/event_core.hpp"
#include "exclab/kernels.hpp"
#include "exclab/lattice.hpp"
#include "exclab/observables.hpp"

namespace exclab {

struct StepInit {};
struct BernoulliInit {
  double rho = 0.5;
};
/// Occupancy of -W..-1 followed by 1..W.
struct ExplicitInit {
  std::vector<std::uint8_t> bits;
};
using EnvInit = std::variant<StepInit, BernoulliInit, ExplicitInit>;

struct EnvCounters {
  long R = 0;  // crossings -1 side -> 1 side
  long L = 0;  // crossings 1 side -> -1 side
  long r = 0;  // tagged right jumps
  long l = 0;  // tagged left jumps

  long N() const { return R - L; }
  long D() const { return r - l; }
};

class EnvState {
 public:
  /// Throws std::invalid_argument on W < 1, densities outside [0, 1], or
  /// explicit bits whose length is not 2W. Bernoulli sites draw from rng.
  static EnvState init(int W, const EnvInit& initial, double lambda_left, double rho_right, Rng& rng);
  static EnvState init(int W, const EnvInit& initial, double lambda_left, double rho_right);

  int W() const { return seg_.hi(); }
  double lambda_left() const { return seg_.geometry().left_density; }
  double rho_right() const { return seg_.geometry().right_density; }
  bool occupied(int x) const { return seg_.occupied(x); }
  const Segment& segment() const { return seg_; }
  Segment& segment() { return seg_; }
  const EnvCounters& counters() const { return counters_; }
  EnvCounters& counters() { return counters_; }
  int particle_count() const { return seg_.particle_count(); }

 private:
  Segment seg_;
  EnvCounters counters_;
};

/// Every red-particle move with positive rate, boundary moves included.
std::vector<RatedMove> exchange_rates(const EnvState& s, const RateKernel& p);

/// Moves the particle at x to y and updates the cut counters. Violated
/// preconditions (x empty, y full, x or y the origin or outside) are a
/// ContractViolation.
void apply_exchange(EnvState& s, int x, int y);

/// Tagged jump by z in {-1, +1}: new(x) = old(x + z), the old seat -z is
/// empty, and the far edge is refilled from the right reservoir (z = +1) or
/// the left reservoir (z = -1). Returns the occupancy that left the window.
/// A full target is a ContractViolation.
std::uint8_t apply_tagged_shift(EnvState& s, int z, Rng& reservoir_rng);

/// Event log line. kind: 'X' exchange (a -> b), 'C' creation at a, 'D'
/// destruction at a, 'S' tagged shift by a with b entering and c dropped.
struct EnvEvent {
  double t = 0.0;
  char kind = 'X';
  int a = 0;
  int b = 0;
  int c = 0;
};

struct EnvRunOptions {
  double horizon = 0.0;
  BatchGrid grid;  // averaging window; defaults to [0, horizon] with one batch
  bool use_grid = false;
  std::vector<CylinderSpec> cylinders;
  std::vector<CurrentSpec> currents;  // counted or time-averaged per mode
  bool track_density = false;         // per-site time-averaged occupation
  bool record_log = false;
  bool boundary_monitor = true;
  SamplerKind sampler = SamplerKind::kFenwick;
};

struct SeriesEstimate {
  std::string name;
  double value = 0.0;          // over the whole averaging window
  std::vector<double> batches;  // per batch
};

struct EnvReport {
  double T = 0.0;
  EnvCounters counters;
  long events = 0;
  bool flagged = false;  // boundary monitor tripped
  std::string flag_reason;
  std::vector<SeriesEstimate> cylinders;
  std::vector<SeriesEstimate> currents;
  SeriesEstimate cut_current;  // (-1, 1) crossings per unit time in the window
  std::optional<TranslateProfile> density;
  int initial_particles = 0;
  int final_particles = 0;
  long created = 0, destroyed = 0, shifted_in = 0, shifted_out = 0;
  std::vector<EnvEvent> log;

  /// initial + created - destroyed + shifted_in - shifted_out == final.
  bool conserved() const;
};

/// Exact simulation of the environment process up to options.horizon.
/// Throws std::invalid_argument if W < p.range(), q is not nearest-neighbor,
/// or an observable leaves the window.
EnvReport run_env(EnvState& s, const RateKernel& p, const TaggedKernel& q, const EnvRunOptions& options, Rng& rng);

/// Net cut crossings of (-1, 1) replayed from a log.
long replay_cut_count(const std::vector<EnvEvent>& log);

}  // namespace exclab
