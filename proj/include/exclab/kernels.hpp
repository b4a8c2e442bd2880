#pragma once

// Jump-rate kernels for the red particles and the tagged particle.
//
// A kernel maps a signed displacement z != 0 to a non-negative rate. Kernels
// are validated once at construction and are immutable afterwards, so any
// simulator holding one can assume the invariants below.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace exclab {

class KernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite-range, translation-invariant jump rates p(z).
///
/// Invariants: every rate is >= 0, at least one rate is > 0, and `range()` is
/// the smallest R with p(z) = 0 for |z| > R.
class RateKernel {
 public:
  /// Throws KernelError on z == 0, negative or non-finite rates, or an
  /// all-zero kernel. Zero entries are dropped.
  explicit RateKernel(const std::map<int, double>& rates);

  double operator()(int z) const;
  int range() const { return range_; }
  const std::map<int, double>& rates() const { return rates_; }

  bool operator==(const RateKernel&) const = default;

 private:
  std::map<int, double> rates_;
  int range_ = 0;
};

/// Jump rates q(z) of the tagged particle. Unlike RateKernel the all-zero
/// kernel is legal: q == 0 is the blockage process.
class TaggedKernel {
 public:
  TaggedKernel() = default;
  explicit TaggedKernel(const std::map<int, double>& rates);

  static TaggedKernel zero() { return TaggedKernel{}; }

  double operator()(int z) const;
  int range() const { return range_; }
  bool nearest_neighbor() const { return range_ <= 1; }
  bool is_zero() const { return rates_.empty(); }
  double total() const;
  const std::map<int, double>& rates() const { return rates_; }

  bool operator==(const TaggedKernel&) const = default;

 private:
  std::map<int, double> rates_;
  int range_ = 0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Per-condition pass/fail report. Validators never throw.
struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  /// Throws std::out_of_range for an unknown check name.
  bool passed(const std::string& name) const;
  std::string summary() const;
};

/// Checks "A1" (p(2) = p(-2) > 0 and p(1) > p(-1)) and "A2" (p(-1) >= p(-2)
/// and p(k) = 0 for |k| > 2).
ValidationReport validate_a1_a2(const RateKernel& p);

/// Checks "dominance" (p(k) >= p(-k) for all k, strict for some k),
/// "range>1" and "p(R)>0".
ValidationReport validate_blockage_assumptions(const RateKernel& p);

/// w = sum_z z * p(z).
double drift_mean(const RateKernel& p);

/// Rates of jumps in one direction indexed by jump length 1..R. A leftward
/// kernel is stored as its mirror image, i.e. as a rightward kernel.
class DirectedKernel {
 public:
  DirectedKernel() = default;
  explicit DirectedKernel(std::vector<double> by_length);

  /// Rate of a jump of length k >= 1 (0 beyond the range).
  double operator()(int k) const;
  /// Rate p(x, y) of the rightward jump x -> y; 0 unless 0 < y - x <= range.
  double between(int x, int y) const;
  int range() const { return static_cast<int>(by_length_.size()); }
  /// Class C monotonicity: rates non-increasing in jump length.
  bool monotone() const;
  const std::vector<double>& by_length() const { return by_length_; }

 private:
  std::vector<double> by_length_;
};

struct KernelPair {
  DirectedKernel plus;   // p(k), k > 0
  DirectedKernel minus;  // p(-k), k > 0, as a rightward kernel

  /// p_c(x, y) = plus(x, y) + minus(y, x).
  double combined(int x, int y) const;
  int range() const;
};

/// Splits p into its rightward and leftward parts and checks class C on both.
/// Throws KernelError if either direction is not non-increasing in length.
KernelPair class_c_decompose(const RateKernel& p);

/// Stationary current of the Bernoulli(rho) product measure: rho(1-rho) w.
double bernoulli_current(const RateKernel& p, double rho);

/// The default experiment kernel {1: 2, -1: 1, 2: 1, -2: 1}.
RateKernel default_kernel();

}  // namespace exclab
