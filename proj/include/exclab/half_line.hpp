#pragma once

// Boundary-driven exclusion on a segment m..n (reservoirs of density lambda on
// the left and rho on the right), the half line with creation realized as the
// segment 1..n with lambda = 1, rho = 0, and the three-class construction that
// compares the blockage process with the half line.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "exclab/env_process.hpp"
#include "exclab/event_core.hpp"
#include "exclab/kernels.hpp"
#include "exclab/lattice.hpp"
#include "exclab/observables.hpp"

namespace exclab {

class BoundaryState {
 public:
  /// All sites empty. Throws std::invalid_argument on n < m or densities
  /// outside [0, 1].
  BoundaryState(int m, int n, double lambda, double rho);

  int m() const { return seg_.lo(); }
  int n() const { return seg_.hi(); }
  double lambda() const { return seg_.geometry().left_density; }
  double rho() const { return seg_.geometry().right_density; }
  bool occupied(int x) const { return seg_.occupied(x); }
  void set(int x, bool v) { seg_.set(x, v); }
  const Segment& segment() const { return seg_; }
  Segment& segment() { return seg_; }
  /// Independent Bernoulli(density) occupation of every site.
  void fill_bernoulli(double density, Rng& rng);

 private:
  Segment seg_;
};

/// Interior exchanges plus reservoir creation/destruction, each with its rate.
std::vector<RatedMove> boundary_rates(const BoundaryState& s, const RateKernel& p);

struct BoundaryRunOptions {
  double horizon = 0.0;
  BatchGrid grid;  // averaging window inside [0, horizon]
  /// Sets A whose translate averages prod_{x in A+k} eta_x are tracked for
  /// every k with A + k inside the segment.
  std::vector<std::vector<int>> patterns;
  /// Bonds (i, i+1) whose currents are counted.
  std::vector<int> bonds;
};

struct BoundaryReport {
  double T = 0.0;
  long events = 0;
  std::vector<TranslateTracker> trackers;  // one per pattern
  std::vector<SeriesEstimate> currents;    // "C[i,i+1]"
};

/// Exact simulation of the boundary-driven system up to options.horizon.
BoundaryReport run_boundary(BoundaryState& s, const RateKernel& p, const BoundaryRunOptions& options, Rng& rng);

/// The half line with creation: segment 1..n, lambda = 1, rho = 0, started
/// empty. Throws std::invalid_argument unless n >= 4R and the drift is
/// positive.
BoundaryReport run_half_line_creation(int n, const RateKernel& p, const BoundaryRunOptions& options, Rng& rng);

struct CurrentCheckOptions {
  double horizon = 2000.0;
  double burn_in = 0.2;
  int batches = 10;
  int replicas = 16;
  double confidence = 0.99;
  std::uint64_t seed = 1;
};

struct CurrentCheck {
  int bond = 0;  // the measured bond is (bond, bond + 1)
  BatchCI measured;
  double bound = 0.0;
  bool pass = false;  // measured.mean >= bound - measured.halfwidth
};

/// w * max{lambda(1 - lambda), rho(1 - rho)}.
double current_lower_bound(const RateKernel& p, double lambda, double rho);

/// Long-run current across the middle bond of m..n, started from
/// Bernoulli(lambda), against the lower bound. Throws std::invalid_argument
/// unless n - m > 2R and lambda >= rho.
CurrentCheck current_bound_check(int m, int n, const RateKernel& p, double lambda, double rho,
                                 const CurrentCheckOptions& options);

/// Holes keep identities; a hole's class is 2 once it has visited a site <= R
/// and 3 before. Particles are class 1.
class ClassedState {
 public:
  /// Window -W..W without the origin: class 1 on x < 0, 2 on 0 < x <= R,
  /// 3 on x > R.
  ClassedState(int W, int R);

  int W() const { return W_; }
  int R() const { return R_; }
  bool contains(int x) const { return x >= -W_ && x <= W_ && x != 0; }
  /// 1, 2 or 3.
  int class_at(int x) const;
  /// Identity of the hole at x, or -1 for a particle.
  int hole_at(int x) const { return hole_[index(x)]; }
  int count(int cls) const;

  /// Jump from x to y; requires class_at(x) < class_at(y).
  void swap(int x, int y);
  /// A class-1 particle from the left reservoir fills x (its hole leaves).
  void fill_from_left(int x);
  /// The occupant of x leaves to the right and a new class-3 hole enters.
  void drain_to_right(int x);

 private:
  std::size_t index(int x) const { return static_cast<std::size_t>(x < 0 ? x + W_ : x + W_ - 1); }
  void place_hole(int x, int id);

  int W_;
  int R_;
  std::vector<int> hole_;              // per site: hole id or -1
  std::vector<std::uint8_t> class_of_;  // per hole id: 2 or 3
};

struct ThreeClassEstimate {
  std::set<int> B;
  double three_class = 0.0;    // fraction of replicas with xi_T(x) != 3 on B + R
  double three_class_se = 0.0;
  double particle = 0.0;       // fraction with class 1 on all of B + R (the blockage marginal)
  double particle_se = 0.0;
};

struct ThreeClassReport {
  int replicas = 0;
  int flagged = 0;  // replicas whose activity reached the window edge
  std::vector<ThreeClassEstimate> estimates;
  bool conserved = true;         // class counts always sum to the window size
  bool class3_monotone = true;   // class-3 count never increased
};

/// Monte Carlo estimate at time T of P(xi_T(x) != 3 for all x in B + R) for
/// each set B, from `replicas` runs of the three-class process started from
/// the step configuration.
ThreeClassReport run_three_class(int W, const RateKernel& p, double T, const std::vector<std::set<int>>& sets,
                                 int replicas, std::uint64_t seed);

/// Fraction (and standard error) of blockage-process replicas from the step
/// configuration with eta_T(x + R) = 1 for all x in B, per set.
std::vector<std::pair<double, double>> blockage_occupation(int W, const RateKernel& p, double T,
                                                           const std::vector<std::set<int>>& sets, int replicas,
                                                           std::uint64_t seed, int* flagged = nullptr);

}  // namespace exclab
