#pragma once

// Exact continuous-time event engine.
//
// RateTable keeps a dynamic set of rated events in a Fenwick tree so that
// updates and weighted selection are O(log n). sample_next draws the next
// event of the jump chain: an exponential waiting time with the table total as
// rate, then an event with probability rate/total.
//
// Ties: events are selected by inverse transform on the cumulative rate, so
// among entries that share a cumulative boundary the lower id wins.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace exclab {

/// Raised when a simulator detects a broken internal contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// SplitMix64 finalizer, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Reproducible random stream. Streams for replicas are derived from a
/// master seed and a stream index, never by sharing one engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for (master, index): the engine is seeded with
  /// mix64(mix64(master) ^ mix64(index + 1)).
  static Rng stream(std::uint64_t master, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

class RateTable {
 public:
  /// Exact resummation cadence (updates).
  static constexpr std::size_t kResumInterval = std::size_t{1} << 16;

  RateTable() = default;
  explicit RateTable(std::size_t n);

  std::size_t size() const { return rates_.size(); }
  /// Sets the rate of `id`, growing the table if needed. Negative or
  /// non-finite rates are a ContractViolation.
  void set(std::size_t id, double rate);
  double rate(std::size_t id) const { return id < rates_.size() ? rates_[id] : 0.0; }
  double total() const { return total_; }
  /// Sum of all rates recomputed from scratch.
  double exact_total() const;
  /// Drops every entry.
  void clear();

  /// Smallest id whose cumulative rate exceeds target, by tree descent.
  std::size_t find(double target) const;
  /// Same contract as find() by linear scan; kept as a debugging reference.
  std::size_t find_linear(double target) const;

 private:
  void rebuild();
  std::size_t clamp_to_positive(std::size_t id) const;

  std::vector<double> rates_;
  std::vector<double> tree_;  // 1-based Fenwick tree over rates_
  std::size_t capacity_ = 0;  // tree size, power of two
  double total_ = 0.0;
  std::size_t updates_since_resum_ = 0;
};

enum class SamplerKind { kFenwick, kLinearScan };

struct Clock {
  double now = 0.0;
  Rng rng;
};

struct Draw {
  std::size_t id;
  double time;
};

/// Advances the clock by an Exp(total) waiting time and picks an event.
/// Returns nullopt ("absorbed") without touching the clock if total == 0.
std::optional<Draw> sample_next(const RateTable& table, Clock& clock,
                                SamplerKind kind = SamplerKind::kFenwick);

/// Splits [start, end] into `batches` equal windows. Integrals and tallies
/// outside the window are discarded, which implements burn-in.
struct BatchGrid {
  double start = 0.0;
  double end = 0.0;
  int batches = 1;

  static BatchGrid with_burn_in(double horizon, double burn_in_fraction, int batches);
  double width() const { return (end - start) / batches; }
  /// Batch containing t, or -1 when t is outside (start, end].
  int batch_of(double t) const;
};

/// Running integrals of piecewise-constant observables, per batch.
///
/// Each observable holds a current value; `update` integrates the old value
/// up to t and then switches. `accumulate` does the same for all observables
/// at once. After `finalize(T)`, average(k) is the exact time average of the
/// path over the grid window.
class TimeAverager {
 public:
  TimeAverager(std::vector<std::string> names, BatchGrid grid);
  TimeAverager(std::vector<std::string> names, double horizon)
      : TimeAverager(std::move(names), BatchGrid{0.0, horizon, 1}) {}

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const BatchGrid& grid() const { return grid_; }

  /// Sets initial values at the grid's time origin (before any integration).
  void reset_values(std::span<const double> values, double at = 0.0);
  void update(std::size_t k, double t, double value);
  /// Integrates every observable's current value up to `until`, then adopts
  /// `values`. Time regression is a ContractViolation.
  void accumulate(double until, std::span<const double> values);
  void finalize(double until);

  double integral(std::size_t k) const;
  double average(std::size_t k) const;
  std::vector<double> batch_means(std::size_t k) const;

 private:
  void integrate(std::size_t k, double until);

  std::vector<std::string> names_;
  BatchGrid grid_;
  std::vector<double> value_;
  std::vector<double> last_;
  std::vector<double> integrals_;  // k * batches + b
};

/// Event tallies per batch (signed counts).
class TallySeries {
 public:
  TallySeries(std::size_t n, BatchGrid grid);

  void add(std::size_t k, double t, double delta);
  double total(std::size_t k) const;
  /// Tally per unit time within each batch.
  std::vector<double> batch_rates(std::size_t k) const;
  double rate(std::size_t k) const;
  const BatchGrid& grid() const { return grid_; }

 private:
  BatchGrid grid_;
  std::size_t n_;
  std::vector<double> counts_;
};

}  // namespace exclab
