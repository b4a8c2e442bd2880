#include "exclab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace exclab {

namespace {

std::map<int, double> checked_rates(const std::map<int, double>& rates) {
  std::map<int, double> out;
  for (const auto& [z, r] : rates) {
    if (z == 0) throw KernelError("kernel: displacement 0 is not a jump");
    if (!std::isfinite(r) || r < 0.0)
      throw KernelError("kernel: rate for z=" + std::to_string(z) + " must be finite and >= 0");
    if (r > 0.0) out.emplace(z, r);
  }
  return out;
}

int range_of(const std::map<int, double>& rates) {
  int range = 0;
  for (const auto& [z, r] : rates) range = std::max(range, std::abs(z));
  return range;
}

double lookup(const std::map<int, double>& rates, int z) {
  auto it = rates.find(z);
  return it == rates.end() ? 0.0 : it->second;
}

}  // namespace

RateKernel::RateKernel(const std::map<int, double>& rates)
    : rates_(checked_rates(rates)), range_(range_of(rates_)) {
  if (rates_.empty()) throw KernelError("kernel: at least one rate must be positive");
}

double RateKernel::operator()(int z) const { return lookup(rates_, z); }

TaggedKernel::TaggedKernel(const std::map<int, double>& rates)
    : rates_(checked_rates(rates)), range_(range_of(rates_)) {}

double TaggedKernel::operator()(int z) const { return lookup(rates_, z); }

double TaggedKernel::total() const {
  double t = 0.0;
  for (const auto& [z, r] : rates_) t += r;
  return t;
}

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool ValidationReport::passed(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c.pass;
  throw std::out_of_range("no check named " + name);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "; ";
  }
  return os.str();
}

ValidationReport validate_a1_a2(const RateKernel& p) {
  ValidationReport rep;
  {
    CheckResult a1{"A1", true, ""};
    if (!(p(2) > 0.0 && p(2) == p(-2))) {
      a1.pass = false;
      a1.detail = "need p(2) = p(-2) > 0";
    } else if (!(p(1) > p(-1))) {
      a1.pass = false;
      a1.detail = "need p(1) > p(-1)";
    }
    rep.checks.push_back(a1);
  }
  {
    CheckResult a2{"A2", true, ""};
    if (!(p(-1) >= p(-2))) {
      a2.pass = false;
      a2.detail = "need p(-1) >= p(-2)";
    } else if (p.range() > 2) {
      a2.pass = false;
      a2.detail = "need p(k) = 0 for |k| > 2";
    }
    rep.checks.push_back(a2);
  }
  return rep;
}

ValidationReport validate_blockage_assumptions(const RateKernel& p) {
  ValidationReport rep;
  const int R = p.range();
  bool dominated = true;
  bool strict = false;
  int bad_k = 0;
  for (int k = 1; k <= R; ++k) {
    if (p(k) < p(-k)) {
      dominated = false;
      bad_k = k;
      break;
    }
    if (p(k) > p(-k)) strict = true;
  }
  CheckResult dom{"dominance", dominated && strict, ""};
  if (!dominated)
    dom.detail = "p(" + std::to_string(bad_k) + ") < p(-" + std::to_string(bad_k) + ")";
  else if (!strict)
    dom.detail = "no k with p(k) > p(-k)";
  rep.checks.push_back(dom);
  rep.checks.push_back({"range>1", R > 1, R > 1 ? "" : "range is " + std::to_string(R)});
  rep.checks.push_back({"p(R)>0", p(R) > 0.0, p(R) > 0.0 ? "" : "p(R) = 0"});
  return rep;
}

double drift_mean(const RateKernel& p) {
  double w = 0.0;
  for (const auto& [z, r] : p.rates()) w += z * r;
  return w;
}

DirectedKernel::DirectedKernel(std::vector<double> by_length) : by_length_(std::move(by_length)) {
  while (!by_length_.empty() && by_length_.back() == 0.0) by_length_.pop_back();
}

double DirectedKernel::operator()(int k) const {
  if (k < 1 || k > range()) return 0.0;
  return by_length_[static_cast<std::size_t>(k - 1)];
}

double DirectedKernel::between(int x, int y) const { return (*this)(y - x); }

bool DirectedKernel::monotone() const {
  for (std::size_t k = 1; k < by_length_.size(); ++k)
    if (by_length_[k] > by_length_[k - 1]) return false;
  return true;
}

double KernelPair::combined(int x, int y) const { return plus.between(x, y) + minus.between(y, x); }

int KernelPair::range() const { return std::max(plus.range(), minus.range()); }

KernelPair class_c_decompose(const RateKernel& p) {
  const int R = p.range();
  std::vector<double> right(static_cast<std::size_t>(R)), left(static_cast<std::size_t>(R));
  for (int k = 1; k <= R; ++k) {
    right[static_cast<std::size_t>(k - 1)] = p(k);
    left[static_cast<std::size_t>(k - 1)] = p(-k);
  }
  KernelPair pair{DirectedKernel(right), DirectedKernel(left)};
  if (!pair.plus.monotone())
    throw KernelError("class C violation: rightward rates are not non-increasing in jump length");
  if (!pair.minus.monotone())
    throw KernelError("class C violation: leftward rates are not non-increasing in jump length");
  return pair;
}

double bernoulli_current(const RateKernel& p, double rho) { return rho * (1.0 - rho) * drift_mean(p); }

RateKernel default_kernel() { return RateKernel({{1, 2.0}, {-1, 1.0}, {2, 1.0}, {-2, 1.0}}); }

}  // namespace exclab
