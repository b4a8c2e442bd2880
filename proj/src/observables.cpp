#include "exclab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace exclab {

CylinderSpec::CylinderSpec(std::string name, std::vector<CylinderTerm> terms)
    : name_(std::move(name)), terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("cylinder " + name_ + ": no terms");
  bool first = true;
  for (const auto& t : terms_) {
    std::set<int> seen;
    for (int x : t.ones)
      if (!seen.insert(x).second) throw std::invalid_argument("cylinder " + name_ + ": repeated site");
    for (int x : t.zeros)
      if (!seen.insert(x).second) throw std::invalid_argument("cylinder " + name_ + ": repeated site");
    for (int x : seen) {
      if (first) {
        min_site_ = max_site_ = x;
        first = false;
      }
      min_site_ = std::min(min_site_, x);
      max_site_ = std::max(max_site_, x);
    }
  }
}

CylinderSpec CylinderSpec::product(std::vector<int> ones, std::vector<int> zeros) {
  std::ostringstream os;
  for (int x : ones) os << "[x=" << x << "]";
  for (int x : zeros) os << "(1-x=" << x << ")";
  return CylinderSpec(os.str(), {CylinderTerm{1.0, std::move(ones), std::move(zeros)}});
}

CylinderSpec CylinderSpec::parse(const std::string& text) {
  std::vector<int> ones, zeros;
  std::size_t pos = 0;
  auto fail = [&]() { throw std::invalid_argument("cannot parse cylinder function '" + text + "'"); };
  auto read_int = [&](std::size_t& p) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(text.substr(p), &used);
    } catch (const std::exception&) {
      fail();
    }
    p += used;
    return v;
  };
  while (pos < text.size()) {
    if (text.compare(pos, 3, "[x=") == 0) {
      pos += 3;
      ones.push_back(read_int(pos));
      if (pos >= text.size() || text[pos] != ']') fail();
      ++pos;
    } else if (text.compare(pos, 5, "(1-x=") == 0) {
      pos += 5;
      zeros.push_back(read_int(pos));
      if (pos >= text.size() || text[pos] != ')') fail();
      ++pos;
    } else {
      fail();
    }
  }
  if (ones.empty() && zeros.empty()) fail();
  return product(std::move(ones), std::move(zeros));
}

bool CylinderSpec::touches(int x) const {
  for (const auto& t : terms_) {
    if (std::find(t.ones.begin(), t.ones.end(), x) != t.ones.end()) return true;
    if (std::find(t.zeros.begin(), t.zeros.end(), x) != t.zeros.end()) return true;
  }
  return false;
}

bool CylinderSpec::uses_origin() const { return touches(0); }

std::string CurrentSpec::name() const {
  const char* prefix = mode == CurrentMode::kCounting ? "C[" : "Cinst[";
  return prefix + std::to_string(i) + "," + std::to_string(j) + "]";
}

double instantaneous_current(const Segment& seg, const RateKernel& p, int i, int j) {
  if (j <= i) throw std::invalid_argument("instantaneous_current: need i < j");
  const int R = p.range();
  if (j - R < seg.lo() || i + R > seg.hi())
    throw std::invalid_argument("instantaneous_current: bond (" + std::to_string(i) + "," + std::to_string(j) +
                                ") lies within the kernel range of the segment edge");
  double c = 0.0;
  for (int x = j - R; x <= i; ++x) {
    if (!seg.contains(x)) continue;
    for (int y = j; y <= x + R; ++y) {
      if (!seg.contains(y)) continue;
      const bool ex = seg.occupied(x), ey = seg.occupied(y);
      if (ex && !ey) c += p(y - x);
      if (ey && !ex) c -= p(x - y);
    }
  }
  return c;
}

bool TranslateProfile::has(int offset) const {
  return offset >= first_offset && offset < first_offset + static_cast<int>(avg.size());
}

double TranslateProfile::at(int offset) const {
  if (!has(offset)) throw std::out_of_range("translate profile: offset " + std::to_string(offset) + " not measured");
  return avg[static_cast<std::size_t>(offset - first_offset)];
}

double cesaro_translate(const TranslateProfile& prof, int from, int count) {
  if (count < 1) throw std::invalid_argument("cesaro_translate: count must be >= 1");
  if (!prof.has(from) || !prof.has(from + count - 1))
    throw std::out_of_range("cesaro_translate: translates leave the measured region");
  double s = 0.0;
  for (int k = from; k < from + count; ++k) s += prof.at(k);
  return s / count;
}

std::vector<double> g_profile(const TranslateProfile& density, const RateKernel& p, int i_from, int i_to) {
  const int R = p.range();
  std::vector<double> weight(static_cast<std::size_t>(R), 0.0);  // weight[|j|]
  for (int a = 0; a < R; ++a)
    for (int k = a + 1; k <= R; ++k) weight[static_cast<std::size_t>(a)] += p(k);
  std::vector<double> out;
  for (int i = i_from; i <= i_to; ++i) {
    double g = 0.0;
    for (int jj = -(R - 1); jj <= R - 1; ++jj) g += weight[static_cast<std::size_t>(std::abs(jj))] * density.at(i + jj);
    out.push_back(g);
  }
  return out;
}

double BatchCI::standard_error() const {
  if (batches < 2 || halfwidth == 0.0) return 0.0;
  return halfwidth / t_quantile(confidence, batches - 1);
}

double t_quantile(double confidence, int df) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  if (df < 1) throw std::invalid_argument("t quantile needs df >= 1");
  boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
}

BatchCI batch_ci(std::span<const double> values, double confidence) {
  if (values.size() < 2) throw std::invalid_argument("batch_ci: need at least 2 batches");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  BatchCI ci;
  ci.mean = mean;
  ci.batches = static_cast<int>(values.size());
  ci.confidence = confidence;
  const double var = ss / (n - 1.0);
  if (!(var > 0.0)) {
    ci.degenerate = true;
    ci.halfwidth = 0.0;
    t_quantile(confidence, ci.batches - 1);  // still validates confidence
    return ci;
  }
  ci.halfwidth = t_quantile(confidence, ci.batches - 1) * std::sqrt(var / n);
  return ci;
}

ChiSquareResult chi_square_two_sample(std::span<const long> a, std::span<const long> b, int min_count) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi-square: empty sample");
  std::map<long, std::pair<long, long>> hist;
  for (long v : a) ++hist[v].first;
  for (long v : b) ++hist[v].second;

  std::vector<std::pair<long, long>> bins;
  std::pair<long, long> cur{0, 0};
  for (const auto& [v, c] : hist) {
    cur.first += c.first;
    cur.second += c.second;
    if (cur.first + cur.second >= min_count) {
      bins.push_back(cur);
      cur = {0, 0};
    }
  }
  if (cur.first + cur.second > 0) {
    if (bins.empty())
      bins.push_back(cur);
    else {
      bins.back().first += cur.first;
      bins.back().second += cur.second;
    }
  }

  ChiSquareResult res;
  res.bins = static_cast<int>(bins.size());
  res.df = res.bins - 1;
  if (res.df < 1) return res;  // a single bin cannot discriminate
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
  for (const auto& [x, y] : bins) {
    const double d = k1 * static_cast<double>(x) - k2 * static_cast<double>(y);
    res.statistic += d * d / static_cast<double>(x + y);
  }
  boost::math::chi_squared dist(res.df);
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

TranslateTracker::TranslateTracker(std::vector<int> pattern, int first_offset, int count, BatchGrid grid)
    : pattern_(std::move(pattern)),
      first_(first_offset),
      count_(count),
      avg_(std::vector<std::string>(static_cast<std::size_t>(std::max(count, 0))), grid) {
  if (pattern_.empty()) throw std::invalid_argument("translate tracker: empty pattern");
  if (count < 1) throw std::invalid_argument("translate tracker: need at least one offset");
}

TranslateProfile TranslateTracker::profile() const {
  TranslateProfile p{pattern_, first_, {}};
  p.avg.reserve(static_cast<std::size_t>(count_));
  for (int k = 0; k < count_; ++k) p.avg.push_back(avg_.average(static_cast<std::size_t>(k)));
  return p;
}

std::vector<double> TranslateTracker::cesaro_batches(int from, int count) const {
  if (count < 1 || from < first_ || from + count > first_ + count_)
    throw std::out_of_range("translate tracker: Cesaro window leaves the tracked offsets");
  std::vector<double> out(static_cast<std::size_t>(avg_.grid().batches), 0.0);
  for (int k = from; k < from + count; ++k) {
    const auto bm = avg_.batch_means(static_cast<std::size_t>(k - first_));
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += bm[b] / count;
  }
  return out;
}

}  // namespace exclab
