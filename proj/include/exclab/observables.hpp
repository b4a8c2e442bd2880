#pragma once

// Statistics over simulated paths: cylinder functions, bond currents,
// translate (Cesaro) averages, the G_i window sums and batch-means intervals.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exclab/event_core.hpp"
#include "exclab/kernels.hpp"
#include "exclab/lattice.hpp"

namespace exclab {

/// prod_{x in ones} eta(x) * prod_{x in zeros} (1 - eta(x)), times coef.
struct CylinderTerm {
  double coef = 1.0;
  std::vector<int> ones;
  std::vector<int> zeros;
};

/// A local function written as a sum of signed cylinder products.
class CylinderSpec {
 public:
  CylinderSpec() = default;
  /// Throws std::invalid_argument if a term repeats a site or the spec is empty.
  CylinderSpec(std::string name, std::vector<CylinderTerm> terms);

  /// Single product term, named like "[x=-1](1-x=1)".
  static CylinderSpec product(std::vector<int> ones, std::vector<int> zeros);
  /// Parses the product naming scheme back ("[x=-1](1-x=1)", "[x=3][x=4]").
  static CylinderSpec parse(const std::string& text);

  const std::string& name() const { return name_; }
  const std::vector<CylinderTerm>& terms() const { return terms_; }
  int min_site() const { return min_site_; }
  int max_site() const { return max_site_; }
  bool touches(int x) const;
  bool uses_origin() const;

  template <class Occ>
  double evaluate(const Occ& occ) const {
    double v = 0.0;
    for (const auto& t : terms_) {
      bool on = true;
      for (int x : t.ones) on = on && occ(x);
      for (int x : t.zeros) on = on && !occ(x);
      if (on) v += t.coef;
    }
    return v;
  }

 private:
  std::string name_;
  std::vector<CylinderTerm> terms_;
  int min_site_ = 0;
  int max_site_ = 0;
};

enum class CurrentMode { kCounting, kInstantaneous };

struct CurrentSpec {
  int i = -1;
  int j = 1;
  CurrentMode mode = CurrentMode::kCounting;

  std::string name() const;
};

/// Net instantaneous jump rate across the cut between i and j:
/// sum over x <= i, y >= j (both valid sites) of p(y-x) eta_x (1-eta_y)
/// minus p(x-y) eta_y (1-eta_x). Throws std::invalid_argument when a jump
/// of length <= R over the cut could start or end outside the segment.
double instantaneous_current(const Segment& seg, const RateKernel& p, int i, int j);

/// Time averages of prod_{x in A + k} eta_x for consecutive offsets k.
struct TranslateProfile {
  std::vector<int> pattern;  // the set A
  int first_offset = 0;      // offset of avg[0]
  std::vector<double> avg;

  bool has(int offset) const;
  double at(int offset) const;
};

/// Mean of the profile over offsets from .. from + count - 1. Throws
/// std::out_of_range if an offset was not measured, std::invalid_argument on
/// count < 1.
double cesaro_translate(const TranslateProfile& prof, int from, int count);

/// G_i = sum_{|j| <= R-1} sum_{k=|j|+1}^{R} p(k) <eta_{i+j}> for i in
/// [i_from, i_to], read from a single-site density profile.
std::vector<double> g_profile(const TranslateProfile& density, const RateKernel& p, int i_from, int i_to);

/// Batch-means confidence interval.
struct BatchCI {
  double mean = 0.0;
  double halfwidth = 0.0;
  int batches = 0;
  double confidence = 0.99;
  bool degenerate = false;  // zero sample variance

  double lo() const { return mean - halfwidth; }
  double hi() const { return mean + halfwidth; }
  /// Standard error implied by the interval.
  double standard_error() const;
};

/// Student-t interval over the given batch means (or replica values).
/// Throws std::invalid_argument for fewer than 2 values or a confidence
/// outside (0, 1).
BatchCI batch_ci(std::span<const double> values, double confidence = 0.99);

/// Two-sided Student-t quantile t_{1-(1-conf)/2, df}.
double t_quantile(double confidence, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Two-sample chi-square homogeneity test on integer-valued samples. Adjacent
/// values are merged until each bin holds at least `min_count` pooled
/// observations. Throws std::invalid_argument on an empty sample.
ChiSquareResult chi_square_two_sample(std::span<const long> a, std::span<const long> b, int min_count = 10);

/// Integrates, per batch, the time averages of prod_{x in A+k} eta_x over a
/// range of offsets k, touching only the offsets affected by a site change.
class TranslateTracker {
 public:
  TranslateTracker(std::vector<int> pattern, int first_offset, int count, BatchGrid grid);

  /// Sets every offset's value from the occupancy at time t.
  template <class Occ>
  void reset(const Occ& occ, double t) {
    std::vector<double> v(static_cast<std::size_t>(count_));
    for (int k = 0; k < count_; ++k) v[static_cast<std::size_t>(k)] = product(occ, first_ + k);
    avg_.reset_values(v, t);
  }

  /// Re-evaluates the offsets whose translate contains site x.
  template <class Occ>
  void site_changed(const Occ& occ, int x, double t) {
    for (int a : pattern_) {
      const int k = x - a;
      if (k >= first_ && k < first_ + count_)
        avg_.update(static_cast<std::size_t>(k - first_), t, product(occ, k));
    }
  }

  void finalize(double t) { avg_.finalize(t); }

  TranslateProfile profile() const;
  /// Cesaro mean over offsets [from, from+count) within each batch.
  std::vector<double> cesaro_batches(int from, int count) const;
  const std::vector<int>& pattern() const { return pattern_; }

 private:
  template <class Occ>
  double product(const Occ& occ, int k) const {
    for (int a : pattern_)
      if (!occ(a + k)) return 0.0;
    return 1.0;
  }

  std::vector<int> pattern_;
  int first_;
  int count_;
  TimeAverager avg_;
};

}  // namespace exclab
