#include "exclab/event_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exclab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

Rng Rng::stream(std::uint64_t master, std::uint64_t index) {
  Rng r;
  r.engine_.seed(mix64(mix64(master) ^ mix64(index + 1)));
  return r;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  // Box-Muller; one draw per call keeps the stream layout simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RateTable::RateTable(std::size_t n) : rates_(n, 0.0) { rebuild(); }

void RateTable::rebuild() {
  capacity_ = 1;
  while (capacity_ < rates_.size()) capacity_ <<= 1;
  tree_.assign(capacity_ + 1, 0.0);
  for (std::size_t i = 0; i < rates_.size(); ++i) tree_[i + 1] = rates_[i];
  for (std::size_t i = 1; i <= capacity_; ++i) {
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= capacity_) tree_[parent] += tree_[i];
  }
  total_ = std::accumulate(rates_.begin(), rates_.end(), 0.0);
  updates_since_resum_ = 0;
}

void RateTable::set(std::size_t id, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw ContractViolation("RateTable::set: rate must be finite and >= 0");
  if (id >= rates_.size()) {
    rates_.resize(id + 1, 0.0);
    if (rates_.size() > capacity_) {
      rates_[id] = rate;
      rebuild();
      return;
    }
  }
  const double delta = rate - rates_[id];
  if (delta == 0.0) return;
  rates_[id] = rate;
  for (std::size_t i = id + 1; i <= capacity_; i += i & (~i + 1)) tree_[i] += delta;
  total_ += delta;
  if (++updates_since_resum_ >= kResumInterval) rebuild();
}

double RateTable::exact_total() const { return std::accumulate(rates_.begin(), rates_.end(), 0.0); }

void RateTable::clear() {
  rates_.clear();
  tree_.clear();
  capacity_ = 0;
  total_ = 0.0;
  updates_since_resum_ = 0;
}

std::size_t RateTable::clamp_to_positive(std::size_t id) const {
  // Rounding can land the search on a zero-rate slot or past the end.
  if (id < rates_.size() && rates_[id] > 0.0) return id;
  std::size_t j = std::min(id, rates_.size());
  while (j > 0) {
    --j;
    if (rates_[j] > 0.0) return j;
  }
  for (std::size_t k = 0; k < rates_.size(); ++k)
    if (rates_[k] > 0.0) return k;
  throw ContractViolation("RateTable: selection from an empty table");
}

std::size_t RateTable::find(double target) const {
  std::size_t pos = 0;
  for (std::size_t mask = capacity_; mask != 0; mask >>= 1) {
    const std::size_t next = pos + mask;
    if (next <= capacity_ && tree_[next] <= target) {
      pos = next;
      target -= tree_[next];
    }
  }
  return clamp_to_positive(pos);
}

std::size_t RateTable::find_linear(double target) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    acc += rates_[i];
    if (acc > target) return clamp_to_positive(i);
  }
  return clamp_to_positive(rates_.size());
}

std::optional<Draw> sample_next(const RateTable& table, Clock& clock, SamplerKind kind) {
  const double total = table.total();
  if (!(total > 0.0)) return std::nullopt;
  clock.now += clock.rng.exponential(total);
  const double target = clock.rng.uniform() * total;
  const std::size_t id = kind == SamplerKind::kFenwick ? table.find(target) : table.find_linear(target);
  return Draw{id, clock.now};
}

BatchGrid BatchGrid::with_burn_in(double horizon, double burn_in_fraction, int batches) {
  return BatchGrid{horizon * burn_in_fraction, horizon, batches};
}

int BatchGrid::batch_of(double t) const {
  if (!(end > start) || t <= start || t > end) return -1;
  const int b = static_cast<int>((t - start) / width());
  return std::min(b, batches - 1);
}

namespace {

/// Adds value * |[a, b] ∩ batch| to each batch slot.
void spread(const BatchGrid& g, double a, double b, double value, double* slots) {
  a = std::max(a, g.start);
  b = std::min(b, g.end);
  if (b <= a || value == 0.0 || !(g.end > g.start)) return;
  const double w = g.width();
  int first = std::min(static_cast<int>((a - g.start) / w), g.batches - 1);
  for (int k = first; k < g.batches; ++k) {
    const double lo = g.start + k * w;
    const double hi = (k == g.batches - 1) ? g.end : lo + w;
    if (lo >= b) break;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (overlap > 0.0) slots[k] += value * overlap;
  }
}

}  // namespace

TimeAverager::TimeAverager(std::vector<std::string> names, BatchGrid grid)
    : names_(std::move(names)),
      grid_(grid),
      value_(names_.size(), 0.0),
      last_(names_.size(), 0.0),
      integrals_(names_.size() * static_cast<std::size_t>(grid.batches), 0.0) {
  if (grid_.batches < 1 || grid_.end < grid_.start)
    throw std::invalid_argument("TimeAverager: invalid batch grid");
}

void TimeAverager::reset_values(std::span<const double> values, double at) {
  if (values.size() != value_.size()) throw std::invalid_argument("TimeAverager: value count mismatch");
  std::copy(values.begin(), values.end(), value_.begin());
  std::fill(last_.begin(), last_.end(), at);
}

void TimeAverager::integrate(std::size_t k, double until) {
  if (until < last_[k]) throw ContractViolation("TimeAverager: time regression");
  spread(grid_, last_[k], until, value_[k], &integrals_[k * static_cast<std::size_t>(grid_.batches)]);
  last_[k] = until;
}

void TimeAverager::update(std::size_t k, double t, double value) {
  integrate(k, t);
  value_[k] = value;
}

void TimeAverager::accumulate(double until, std::span<const double> values) {
  if (values.size() != value_.size()) throw std::invalid_argument("TimeAverager: value count mismatch");
  for (std::size_t k = 0; k < value_.size(); ++k) update(k, until, values[k]);
}

void TimeAverager::finalize(double until) {
  for (std::size_t k = 0; k < value_.size(); ++k) integrate(k, until);
}

double TimeAverager::integral(std::size_t k) const {
  const auto b = static_cast<std::size_t>(grid_.batches);
  return std::accumulate(integrals_.begin() + static_cast<std::ptrdiff_t>(k * b),
                         integrals_.begin() + static_cast<std::ptrdiff_t>((k + 1) * b), 0.0);
}

double TimeAverager::average(std::size_t k) const {
  const double span = grid_.end - grid_.start;
  return span > 0.0 ? integral(k) / span : 0.0;
}

std::vector<double> TimeAverager::batch_means(std::size_t k) const {
  const auto b = static_cast<std::size_t>(grid_.batches);
  std::vector<double> out(b);
  for (std::size_t i = 0; i < b; ++i) out[i] = integrals_[k * b + i] / grid_.width();
  return out;
}

TallySeries::TallySeries(std::size_t n, BatchGrid grid)
    : grid_(grid), n_(n), counts_(n * static_cast<std::size_t>(grid.batches), 0.0) {}

void TallySeries::add(std::size_t k, double t, double delta) {
  const int b = grid_.batch_of(t);
  if (b < 0) return;
  counts_[k * static_cast<std::size_t>(grid_.batches) + static_cast<std::size_t>(b)] += delta;
}

double TallySeries::total(std::size_t k) const {
  const auto b = static_cast<std::size_t>(grid_.batches);
  double s = 0.0;
  for (std::size_t i = 0; i < b; ++i) s += counts_[k * b + i];
  return s;
}

std::vector<double> TallySeries::batch_rates(std::size_t k) const {
  const auto b = static_cast<std::size_t>(grid_.batches);
  std::vector<double> out(b);
  for (std::size_t i = 0; i < b; ++i) out[i] = counts_[k * b + i] / grid_.width();
  return out;
}

double TallySeries::rate(std::size_t k) const {
  const double span = grid_.end - grid_.start;
  return span > 0.0 ? total(k) / span : 0.0;
}

}  // namespace exclab
