#include "exclab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "exclab/env_process.hpp"
#include "exclab/half_line.hpp"
#include "exclab/harness.hpp"
#include "exclab/labeled_coupling.hpp"
#include "exclab/lattice.hpp"
#include "exclab/observables.hpp"

namespace exclab {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kConfidence = 0.99;

// Blockage / tagged environment runs shared by several criteria.
constexpr int kEnvW = 400;
constexpr double kEnvT = 50.0;
constexpr int kEnvReplicas = 64;
constexpr int kSpeedReplicas = 128;
constexpr double kSpeedQPlus = 0.01;

std::uint64_t criterion_seed(std::uint64_t seed, int number, int part = 0) {
  return mix64(mix64(seed) + static_cast<std::uint64_t>(number) * 1000 + static_cast<std::uint64_t>(part));
}

std::string seed_note(const std::string& what, std::uint64_t master, long streams) {
  return what + ": master " + std::to_string(master) + ", streams 0.." + std::to_string(streams - 1);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
}

struct EnvBatch {
  std::vector<double> n_over_t;
  std::vector<double> d_over_t;
  std::vector<EnvReport> reports;
  int flagged = 0;
  bool conserved = true;
};

EnvBatch run_env_batch(int W, double T, int replicas, const RateKernel& p, const TaggedKernel& q,
                       const EnvRunOptions& base, std::uint64_t master, int threads, double lambda = 1.0,
                       double rho = 0.0) {
  EnvBatch b;
  b.reports.resize(static_cast<std::size_t>(replicas));
  EnvRunOptions opt = base;
  opt.horizon = T;
  parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t r) {
    Rng rng = Rng::stream(master, r);
    EnvState s = EnvState::init(W, StepInit{}, lambda, rho, rng);
    b.reports[r] = run_env(s, p, q, opt, rng);
  });
  for (const auto& rep : b.reports) {
    b.n_over_t.push_back(static_cast<double>(rep.counters.N()) / T);
    b.d_over_t.push_back(static_cast<double>(rep.counters.D()) / T);
    b.flagged += rep.flagged;
    b.conserved = b.conserved && rep.conserved();
  }
  return b;
}

struct C1Cache {
  double c1 = 0.0;
  double halfwidth = 0.0;
};

class Suite {
 public:
  explicit Suite(const AcceptanceOptions& o) : opt_(o), p_(default_kernel()) {
    std::filesystem::create_directories(opt_.out_dir);
  }

  AcceptanceResult run(int number) {
    AcceptanceResult r;
    r.number = number;
    r.id = criterion_ids()[static_cast<std::size_t>(number - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      switch (number) {
        case 1: coupling_order(r); break;
        case 2: selector_oracle(r); break;
        case 3: marginal_law(r); break;
        case 4: bernoulli_current(r); break;
        case 5: current_positivity(r); break;
        case 6: error_bound(r); break;
        case 7: constant_current(r); break;
        case 8: halfline_density(r); break;
        case 9: halfline_current_bound(r); break;
        case 10: three_class(r); break;
        case 11: identity_checks(r); break;
        case 12: tagged_speed(r); break;
        case 13: monotone_f(r); break;
        case 14: shift_monotonicity(r); break;
      }
    } catch (const ContractViolation& e) {
      r.verdict = Verdict::kFail;
      r.invariant_violation = true;
      r.detail = std::string("invariant violation: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

 private:
  // 1
  void coupling_order(AcceptanceResult& r) {
    const TaggedKernel q({{1, 0.05}, {-1, 0.05}});
    const int replicas = 100;
    const double T = 50.0;
    long events = 0, violations = 0, identity = 0;
    std::string first_violation;
    const CouplingVariant variants[] = {CouplingVariant::kFull, CouplingVariant::kRight, CouplingVariant::kLeft};
    for (int k = 0; k < 3; ++k) {
      const CouplingVariant v = variants[k];
      const std::uint64_t master = criterion_seed(opt_.seed, 1, k);
      std::vector<CoupledReport> reps(replicas);
      parallel_for(replicas, opt_.threads, [&](std::size_t i) {
        Rng rng = Rng::stream(master, i);
        CoupledState c = random_ordered_pair(rng, 40, -40, 40, p_.range(), true);
        CoupledRunOptions o;
        o.horizon = T;
        reps[i] = coupled_run(c, p_, q, v, o, rng);
      });
      for (const auto& rep : reps) {
        events += rep.events;
        if (rep.violation) {
          ++violations;
          if (first_violation.empty()) first_violation = rep.diagnostic;
        }
        long ru = rep.upper.counters.N + (v == CouplingVariant::kRight ? rep.upper.counters.r : 0);
        long rl = rep.lower.counters.N - (v == CouplingVariant::kLeft ? rep.lower.counters.l : 0);
        if (!rep.violation && (rep.upper.f0 - rep.upper.fT != ru || rep.lower.f0 - rep.lower.fT != rl)) ++identity;
      }
      r.seeds.push_back(seed_note(to_string(v), master, replicas));
    }
    r.measured = {{"events", double(events)}, {"order_violations", double(violations)},
                  {"counting_identity_failures", double(identity)}};
    r.thresholds = {{"min_events", 1e6}, {"max_order_violations", 0}};
    r.invariant_violation = violations > 0;
    r.verdict = violations == 0 && events >= 1000000 ? Verdict::kPass : Verdict::kFail;
    r.detail = "variants full/right/left, 3 x " + std::to_string(replicas) +
               " random ordered pairs of 40 particles, T=50, q={1:0.05,-1:0.05}";
    if (!first_violation.empty()) r.detail += "; first violation: " + first_violation;
  }

  // 2
  void selector_oracle(AcceptanceResult& r) {
    const int R = 2;
    const long pairs = 100000;
    const std::uint64_t master = criterion_seed(opt_.seed, 2);
    Rng rng = Rng::stream(master, 0);
    long cases = 0, failures = 0, empty = 0;
    std::string example;
    auto check = [&](const CoupledState& c, long i, int z, bool right) {
      const LabeledState& X = c.upper;
      const LabeledState& Y = c.lower;
      const int s = right ? target_site(X, Y, i, z, R) : target_site_left(X, Y, i, z, R);
      std::set<int> admissible;
      for (int t = 0; t <= R; ++t) {
        if (right) {
          if (t > 0 && !X.can_move(i, t)) continue;
          if (t > 0 && X.pos(i) + t > Y.pos(i) + z) continue;
          if (dominates(t_move(X, i, t), t_move(Y, i, z))) admissible.insert(t);
        } else {
          if (t > 0 && !Y.can_move(i, -t)) continue;
          if (t > 0 && Y.pos(i) - t < X.pos(i) - z) continue;
          if (dominates(t_move(X, i, -z), t_move(Y, i, -t))) admissible.insert(t);
        }
      }
      ++cases;
      if (admissible.empty()) ++empty;
      if (!admissible.count(s)) {
        ++failures;
        if (example.empty())
          example = "upper " + X.to_string() + ", lower " + Y.to_string() + ", label " + std::to_string(i) +
                    ", z " + std::to_string(right ? z : -z) + " -> " + std::to_string(s);
      }
    };
    for (long k = 0; k < pairs; ++k) {
      const int n = 1 + static_cast<int>(rng.below(12));
      const bool blocked = (rng.uniform() < 0.5);
      const CoupledState c = random_ordered_pair(rng, n, -10, 10, R, blocked);
      for (long i = c.lower.first_label(); i <= c.lower.last_label(); ++i) {
        if (!c.upper.tracks(i)) continue;
        for (int z = 1; z <= R; ++z) {
          if (c.lower.can_move(i, z)) check(c, i, z, true);
          if (c.upper.can_move(i, -z)) check(c, i, z, false);
        }
      }
    }
    r.measured = {{"pairs", double(pairs)}, {"selector_calls", double(cases)}, {"oracle_failures", double(failures)},
                  {"no_admissible_target", double(empty)}};
    r.thresholds = {{"max_oracle_failures", 0}};
    r.seeds.push_back(seed_note("random pairs", master, 1));
    r.invariant_violation = failures > 0;
    r.verdict = failures == 0 ? Verdict::kPass : Verdict::kFail;
    r.detail = "right and mirrored left selections checked against every s in 0..R";
    if (!example.empty()) r.detail += "; first failure: " + example;
  }

  // 3
  void marginal_law(AcceptanceResult& r) {
    const int replicas = 2000;
    const double T = 5.0;
    const long label = 10;
    const TaggedKernel q({{1, 0.25}, {-1, 0.25}});
    const RateKernel plus_kernel({{1, 2.0}, {2, 1.0}});
    const int tests = 16;
    const double alpha = 0.01 / tests;
    Rng pair_rng = Rng::stream(criterion_seed(opt_.seed, 3, 99), 0);
    const CoupledState start = random_ordered_pair(pair_rng, 20, -15, 15, p_.range(), true);
    double min_p = 1.0;
    std::string worst;
    const CouplingVariant variants[] = {CouplingVariant::kPlus, CouplingVariant::kFull, CouplingVariant::kRight,
                                        CouplingVariant::kLeft};
    for (int k = 0; k < 4; ++k) {
      const CouplingVariant v = variants[k];
      const RateKernel& kern = v == CouplingVariant::kPlus ? plus_kernel : p_;
      const bool tagged = v == CouplingVariant::kRight || v == CouplingVariant::kLeft;
      const TaggedKernel qq = tagged ? q : TaggedKernel::zero();
      const auto gu = v == CouplingVariant::kRight ? LabeledGenerator::kRightShift : LabeledGenerator::kPlain;
      const auto gl = v == CouplingVariant::kLeft ? LabeledGenerator::kLeftShift : LabeledGenerator::kPlain;
      const TaggedKernel qu = v == CouplingVariant::kRight ? q : TaggedKernel::zero();
      const TaggedKernel ql = v == CouplingVariant::kLeft ? q : TaggedKernel::zero();
      const std::uint64_t mc = criterion_seed(opt_.seed, 3, 2 * k), ms = criterion_seed(opt_.seed, 3, 2 * k + 1);
      std::vector<long> cf[2], cd[2], sf[2], sd[2];
      for (int w = 0; w < 2; ++w) {
        cf[w].resize(replicas);
        cd[w].resize(replicas);
        sf[w].resize(replicas);
        sd[w].resize(replicas);
      }
      parallel_for(replicas, opt_.threads, [&](std::size_t i) {
        Rng a = Rng::stream(mc, i), b = Rng::stream(ms, i);
        CoupledState c = start;
        CoupledRunOptions o;
        o.horizon = T;
        o.tracked_label = label;
        const auto rep = coupled_run(c, kern, qq, v, o, a);
        if (rep.violation) throw ContractViolation("coupling order violated: " + rep.diagnostic);
        cf[0][i] = rep.upper.fT;
        cd[0][i] = static_cast<long>(rep.upper.displacement);
        cf[1][i] = rep.lower.fT;
        cd[1][i] = static_cast<long>(rep.lower.displacement);
        LabeledState X = start.upper, Y = start.lower;
        const auto su = run_labeled(X, kern, qu, gu, T, label, b);
        const auto sl = run_labeled(Y, kern, ql, gl, T, label, b);
        sf[0][i] = su.fT;
        sd[0][i] = static_cast<long>(su.displacement);
        sf[1][i] = sl.fT;
        sd[1][i] = static_cast<long>(sl.displacement);
      });
      for (int w = 0; w < 2; ++w) {
        const char* who = w == 0 ? "upper" : "lower";
        const auto tf = chi_square_two_sample(cf[w], sf[w]);
        const auto td = chi_square_two_sample(cd[w], sd[w]);
        const std::string base = to_string(v) + "_" + who;
        r.measured.push_back({"p_" + base + "_F", tf.p_value});
        r.measured.push_back({"p_" + base + "_displacement", td.p_value});
        for (const auto& [name, pv] : {std::pair{base + "_F", tf.p_value}, std::pair{base + "_displacement", td.p_value}})
          if (pv < min_p) {
            min_p = pv;
            worst = name;
          }
      }
      r.seeds.push_back(seed_note(to_string(v) + " coupled", mc, replicas));
      r.seeds.push_back(seed_note(to_string(v) + " standalone", ms, replicas));
    }
    r.measured.push_back({"min_p_value", min_p});
    r.thresholds = {{"alpha_family", 0.01}, {"alpha_per_test", alpha}};
    r.verdict = min_p >= alpha ? Verdict::kPass : Verdict::kFail;
    r.detail = "chi-square two-sample tests of F and label-" + std::to_string(label) +
               " displacement at T=5, 2000 replicas per side, 16 tests (Bonferroni); smallest p at " + worst;
  }

  // 4
  void bernoulli_current(AcceptanceResult& r) {
    const int L = 256, N = 128, replicas = 16;
    const double T = 200.0;
    const std::uint64_t master = criterion_seed(opt_.seed, 4);
    std::vector<double> cur(replicas);
    parallel_for(replicas, opt_.threads, [&](std::size_t i) {
      Rng rng = Rng::stream(master, i);
      cur[i] = run_torus(L, N, p_, T, rng).current;
    });
    const double m = mean_of(cur);
    const double exact = drift_mean(p_) * (double(N) / L) * (double(L - N) / (L - 1));
    r.measured = {{"current", m}, {"standard_error", se_of(cur)}, {"finite_ring_value", exact}};
    r.thresholds = {{"target", 0.25}, {"tolerance", 0.01}};
    r.seeds.push_back(seed_note("torus", master, replicas));
    r.verdict = std::abs(m - 0.25) <= 0.01 ? Verdict::kPass : Verdict::kFail;
    r.detail = "ring of 256 sites with 128 particles, T=200, 16 replicas; current = total displacement / (L T)";
  }

  std::string c1_key() const {
    return "blockage W=" + std::to_string(kEnvW) + " T=" + std::to_string(kEnvT) +
           " replicas=" + std::to_string(kEnvReplicas) + " seed=" + std::to_string(opt_.seed) +
           " kernel={1:2,-1:1,2:1,-2:1}";
  }
  std::filesystem::path c1_path() const { return std::filesystem::path(opt_.out_dir) / "c1_estimate.json"; }

  std::optional<C1Cache> load_c1() const {
    std::ifstream in(c1_path());
    if (!in) return std::nullopt;
    try {
      Json j = Json::parse(in);
      char hash[17];
      std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(c1_key())));
      if (j.at("config_hash").get<std::string>() != hash) return std::nullopt;
      return C1Cache{j.at("c1").get<double>(), j.at("halfwidth").get<double>()};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  bool need_c1(AcceptanceResult& r, C1Cache& out) {
    const auto c = load_c1();
    if (!c) {
      r.verdict = Verdict::kFail;
      r.detail = "run current-positivity first";
      return false;
    }
    out = *c;
    return true;
  }

  // 5
  void current_positivity(AcceptanceResult& r) {
    const std::uint64_t m50 = criterion_seed(opt_.seed, 5, 0), m25 = criterion_seed(opt_.seed, 5, 1);
    EnvRunOptions opt;
    const auto b50 = run_env_batch(kEnvW, kEnvT, kEnvReplicas, p_, TaggedKernel::zero(), opt, m50, opt_.threads);
    const auto b25 = run_env_batch(kEnvW, kEnvT / 2, kEnvReplicas, p_, TaggedKernel::zero(), opt, m25, opt_.threads);
    const BatchCI c50 = batch_ci(b50.n_over_t, kConfidence);
    const BatchCI c25 = batch_ci(b25.n_over_t, kConfidence);
    const double rel = std::abs(c50.mean - c25.mean) / std::abs(c50.mean);
    r.measured = {{"C1_T50", c50.mean}, {"halfwidth_T50", c50.halfwidth}, {"C1_T25", c25.mean},
                  {"halfwidth_T25", c25.halfwidth}, {"relative_difference", rel}};
    r.thresholds = {{"ci_lower_above", 0.0}, {"max_relative_difference", 0.15}};
    r.seeds.push_back(seed_note("T=50", m50, kEnvReplicas));
    r.seeds.push_back(seed_note("T=25", m25, kEnvReplicas));
    const bool ok = c50.lo() > 0.0 && rel < 0.15;
    if (!b50.conserved || !b25.conserved) {
      r.invariant_violation = true;
      r.verdict = Verdict::kFail;
      r.detail = "particle bookkeeping violated";
      return;
    }
    if (b50.flagged + b25.flagged > 0) {
      r.verdict = Verdict::kInvalid;
      r.detail = std::to_string(b50.flagged + b25.flagged) + " runs reached the window edge";
      return;
    }
    r.verdict = ok ? Verdict::kPass : Verdict::kFail;
    r.detail = "blockage (q=0), step start, W=400, 64 replicas per horizon; C1 = mean N_T/T at T=50";
    Json j;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(c1_key())));
    j["c1"] = c50.mean;
    j["halfwidth"] = c50.halfwidth;
    j["confidence"] = kConfidence;
    j["config"] = c1_key();
    j["config_hash"] = hash;
    std::ofstream(c1_path()) << j.dump(2) << "\n";
  }

  // 6
  void error_bound(AcceptanceResult& r) {
    C1Cache c1;
    if (!need_c1(r, c1)) return;
    const TaggedKernel q({{1, 0.01}, {-1, 0.012}});
    const std::uint64_t master = criterion_seed(opt_.seed, 6);
    const auto b = run_env_batch(kEnvW, kEnvT, kEnvReplicas, p_, q, EnvRunOptions{}, master, opt_.threads);
    const BatchCI ci = batch_ci(b.n_over_t, kConfidence);
    const double diff = std::abs(ci.mean - c1.c1);
    const double allowed = 0.022 + ci.halfwidth + c1.halfwidth;
    r.measured = {{"tagged_N_over_T", ci.mean}, {"halfwidth", ci.halfwidth}, {"C1", c1.c1},
                  {"C1_halfwidth", c1.halfwidth}, {"difference", diff}};
    r.thresholds = {{"allowed_difference", allowed}};
    r.seeds.push_back(seed_note("tagged q={1:0.01,-1:0.012}", master, kEnvReplicas));
    if (!b.conserved) {
      r.invariant_violation = true;
      r.detail = "particle bookkeeping violated";
      return;
    }
    if (b.flagged > 0) {
      r.verdict = Verdict::kInvalid;
      r.detail = std::to_string(b.flagged) + " runs reached the window edge";
      return;
    }
    r.verdict = diff <= allowed ? Verdict::kPass : Verdict::kFail;
    r.detail = "|mean N_T/T (tagged) - C1| <= T-scaled tagged rate budget 0.022 + both CI halfwidths";
  }

  // 7
  void constant_current(AcceptanceResult& r) {
    const int W = 60, replicas = 8;
    const double T = 4000.0;
    EnvRunOptions opt;
    opt.grid = BatchGrid::with_burn_in(T, 0.2, 1);
    opt.use_grid = true;
    opt.boundary_monitor = false;
    opt.currents = {{-1, 1, CurrentMode::kCounting}, {5, 6, CurrentMode::kCounting}, {10, 11, CurrentMode::kCounting}};
    const std::uint64_t master = criterion_seed(opt_.seed, 7);
    const auto b = run_env_batch(W, T, replicas, p_, TaggedKernel::zero(), opt, master, opt_.threads);
    std::vector<std::vector<double>> cur(3);
    for (const auto& rep : b.reports)
      for (std::size_t k = 0; k < 3; ++k) cur[k].push_back(rep.currents[k].value);
    const char* names[] = {"C[-1,1]", "C[5,6]", "C[10,11]"};
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      r.measured.push_back({std::string(names[k]), mean_of(cur[k])});
      r.measured.push_back({std::string(names[k]) + "_se", se_of(cur[k])});
    }
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t c = a + 1; c < 3; ++c) {
        const double z = std::abs(mean_of(cur[a]) - mean_of(cur[c])) /
                         std::sqrt(se_of(cur[a]) * se_of(cur[a]) + se_of(cur[c]) * se_of(cur[c]));
        worst = std::max(worst, z);
      }
    r.measured.push_back({"max_pairwise_sigma", worst});
    r.thresholds = {{"max_sigma", 3.0}};
    r.seeds.push_back(seed_note("window W=60", master, replicas));
    if (!b.conserved) {
      r.invariant_violation = true;
      r.detail = "particle bookkeeping violated";
      return;
    }
    r.verdict = worst <= 3.0 ? Verdict::kPass : Verdict::kFail;
    r.detail = "blockage in the window -60..60 with reservoirs lambda=1, rho=0, T=4000, first 20% discarded, "
               "8 replicas; counting currents per replica";
  }

  // 8
  void halfline_density(AcceptanceResult& r) {
    const int n = 200, replicas = 8, from = 50, count = 100;
    const double T = 400.0;
    BoundaryRunOptions opt;
    opt.horizon = T;
    opt.grid = BatchGrid::with_burn_in(T, 0.5, 1);
    opt.patterns = {{0}, {0, 1}};
    const std::uint64_t master = criterion_seed(opt_.seed, 8);
    std::vector<double> one(replicas), two(replicas);
    parallel_for(replicas, opt_.threads, [&](std::size_t i) {
      Rng rng = Rng::stream(master, i);
      const auto rep = run_half_line_creation(n, p_, opt, rng);
      one[i] = cesaro_translate(rep.trackers[0].profile(), from, count);
      two[i] = cesaro_translate(rep.trackers[1].profile(), from, count);
    });
    const double m1 = mean_of(one), m2 = mean_of(two);
    r.measured = {{"cesaro_A1", m1}, {"cesaro_A1_se", se_of(one)}, {"cesaro_A2", m2}, {"cesaro_A2_se", se_of(two)}};
    r.thresholds = {{"A1_target", 0.5}, {"A1_tolerance", 0.03}, {"A2_target", 0.25}, {"A2_tolerance", 0.04}};
    r.seeds.push_back(seed_note("half line", master, replicas));
    r.verdict = std::abs(m1 - 0.5) <= 0.03 && std::abs(m2 - 0.25) <= 0.04 ? Verdict::kPass : Verdict::kFail;
    r.detail = "segment 1..200 from empty, T=400, time average over [200, 400], translates 50..149, 8 replicas";
  }

  // 9
  void halfline_current_bound(AcceptanceResult& r) {
    CurrentCheckOptions o;
    o.seed = criterion_seed(opt_.seed, 9);
    o.confidence = kConfidence;
    const auto c = current_bound_check(1, 100, p_, 0.5, 0.0, o);
    r.measured = {{"current", c.measured.mean}, {"halfwidth", c.measured.halfwidth}};
    r.thresholds = {{"bound", c.bound}};
    r.seeds.push_back(seed_note("segment 1..100", o.seed, o.replicas));
    r.verdict = c.pass ? Verdict::kPass : Verdict::kFail;
    r.detail = "lambda=0.5, rho=0, bond (" + std::to_string(c.bond) + "," + std::to_string(c.bond + 1) +
               "), T=2000 with 20% burn-in, batch means pooled over 16 replicas";
  }

  // 10
  void three_class(AcceptanceResult& r) {
    const int W = 200, replicas = 2000;
    const double T = 20.0;
    const std::vector<std::set<int>> sets = {{1}, {1, 2}};
    const std::uint64_t m3 = criterion_seed(opt_.seed, 10, 0), mb = criterion_seed(opt_.seed, 10, 1);
    const auto tc = run_three_class(W, p_, T, sets, replicas, m3);
    int flagged = 0;
    const auto bl = blockage_occupation(W, p_, T, sets, replicas, mb, &flagged);
    bool ok = true;
    const char* names[] = {"A={1}", "A={1,2}"};
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto& e = tc.estimates[k];
      const double slack = 3.0 * std::sqrt(e.three_class_se * e.three_class_se + bl[k].second * bl[k].second);
      r.measured.push_back({std::string("blockage_") + names[k], bl[k].first});
      r.measured.push_back({std::string("three_class_") + names[k], e.three_class});
      r.thresholds.push_back({std::string("max_blockage_") + names[k], e.three_class + slack});
      ok = ok && bl[k].first <= e.three_class + slack;
    }
    r.seeds.push_back(seed_note("three-class", m3, replicas));
    r.seeds.push_back(seed_note("blockage", mb, replicas));
    if (!tc.conserved || !tc.class3_monotone) {
      r.invariant_violation = true;
      r.detail = "class bookkeeping violated";
      return;
    }
    if (tc.flagged + flagged > 0) {
      r.verdict = Verdict::kInvalid;
      r.detail = std::to_string(tc.flagged + flagged) + " runs reached the window edge";
      return;
    }
    r.verdict = ok ? Verdict::kPass : Verdict::kFail;
    r.detail = "step start, W=200, T=20, 2000 replicas per process";
  }

  struct SpeedRuns {
    TaggedGap gap;
    EnvBatch batch;
    std::uint64_t master = 0;
  };

  const SpeedRuns& speed_runs(const C1Cache& c1) {
    if (!speed_) {
      SpeedRuns s;
      s.gap = select_tagged_gap(c1.c1, kSpeedQPlus, p_);
      const TaggedKernel q({{1, kSpeedQPlus}, {-1, s.gap.q_minus}});
      EnvRunOptions opt;
      opt.cylinders = {CylinderSpec::product({-1}, {1}), CylinderSpec::product({1}, {-1}),
                       CylinderSpec::product({}, {1}), CylinderSpec::product({}, {-1})};
      s.master = criterion_seed(opt_.seed, 12);
      s.batch = run_env_batch(kEnvW, kEnvT, kSpeedReplicas, p_, q, opt, s.master, opt_.threads);
      speed_ = std::move(s);
    }
    return *speed_;
  }

  // 11
  void identity_checks(AcceptanceResult& r) {
    C1Cache c1;
    if (!need_c1(r, c1)) return;
    const auto& s = speed_runs(c1);
    std::vector<double> lhs1, lhs2;
    for (const auto& rep : s.batch.reports) {
      lhs1.push_back(p_(2) * rep.cylinders[0].value - p_(-2) * rep.cylinders[1].value);
      lhs2.push_back(kSpeedQPlus * rep.cylinders[2].value - s.gap.q_minus * rep.cylinders[3].value);
    }
    auto sigma = [](const std::vector<double>& a, const std::vector<double>& b) {
      return std::abs(mean_of(a) - mean_of(b)) / std::sqrt(se_of(a) * se_of(a) + se_of(b) * se_of(b));
    };
    const double z1 = sigma(lhs1, s.batch.n_over_t), z2 = sigma(lhs2, s.batch.d_over_t);
    r.measured = {{"current_rate_average", mean_of(lhs1)}, {"N_over_T", mean_of(s.batch.n_over_t)},
                  {"current_sigma", z1}, {"drift_rate_average", mean_of(lhs2)},
                  {"D_over_T", mean_of(s.batch.d_over_t)}, {"drift_sigma", z2}};
    r.thresholds = {{"max_sigma", 3.0}};
    r.seeds.push_back(seed_note("tagged runs", s.master, kSpeedReplicas));
    if (s.batch.flagged > 0) {
      r.verdict = Verdict::kInvalid;
      r.detail = std::to_string(s.batch.flagged) + " runs reached the window edge";
      return;
    }
    r.verdict = z1 <= 3.0 && z2 <= 3.0 ? Verdict::kPass : Verdict::kFail;
    r.detail = "time averages over [0, T] of p(2) x(-1)(1-x(1)) - p(-2) x(1)(1-x(-1)) vs N_T/T and "
               "q(1)(1-x(1)) - q(-1)(1-x(-1)) vs D_T/T; runs shared with tagged-speed";
  }

  // 12
  void tagged_speed(AcceptanceResult& r) {
    C1Cache c1;
    if (!need_c1(r, c1)) return;
    const auto& s = speed_runs(c1);
    const BatchCI ci = batch_ci(s.batch.d_over_t, kConfidence);
    const double predicted = 0.75 * (kSpeedQPlus / p_(2)) * s.gap.c0;
    r.measured = {{"D_over_T", ci.mean}, {"halfwidth", ci.halfwidth}, {"q_minus", s.gap.q_minus},
                  {"C0", s.gap.c0}, {"predicted_lower_bound", predicted}};
    r.thresholds = {{"ci_lower_above", 0.0}, {"min_mean", 0.5 * predicted}};
    r.seeds.push_back(seed_note("tagged runs", s.master, kSpeedReplicas));
    if (!s.batch.conserved) {
      r.invariant_violation = true;
      r.detail = "particle bookkeeping violated";
      return;
    }
    if (s.batch.flagged > 0) {
      r.verdict = Verdict::kInvalid;
      r.detail = std::to_string(s.batch.flagged) + " runs reached the window edge";
      return;
    }
    r.verdict = ci.lo() > 0.0 && ci.mean >= 0.5 * predicted ? Verdict::kPass : Verdict::kFail;
    r.detail = "q(1)=0.01, q(-1) from the tagged gap rule, step start, W=400, T=50, 128 replicas";
  }

  // 13
  void monotone_f(AcceptanceResult& r) {
    const long pairs = 10000;
    const std::uint64_t master = criterion_seed(opt_.seed, 13);
    Rng rng = Rng::stream(master, 0);
    long failures = 0;
    for (long k = 0; k < pairs; ++k) {
      const CoupledState c = k % 2 == 0
                                 ? random_ordered_pair(rng, 1 + static_cast<int>(rng.below(20)), -15, 15, 2,
                                                       (rng.uniform() < 0.5))
                                 : random_packed_pair(rng, 1 + static_cast<int>(rng.below(10)), 2);
      if (!dominates(c.upper, c.lower)) throw ContractViolation("generated pair is not ordered");
      if (f_count(c.upper) > f_count(c.lower)) ++failures;
    }
    r.measured = {{"pairs", double(pairs)}, {"failures", double(failures)}};
    r.thresholds = {{"max_failures", 0}};
    r.seeds.push_back(seed_note("random pairs", master, 1));
    r.verdict = failures == 0 ? Verdict::kPass : Verdict::kFail;
    r.detail = "finite clouds and left-packed states, F(upper) <= F(lower)";
  }

  // 14
  void shift_monotonicity(AcceptanceResult& r) {
    const long states = 10000;
    const std::uint64_t master = criterion_seed(opt_.seed, 14);
    Rng rng = Rng::stream(master, 0);
    long checks = 0, failures = 0;
    for (long k = 0; k < states; ++k) {
      const LabeledState s = k % 2 == 0
                                 ? random_cloud(rng, static_cast<int>(rng.below(16)), -12, 12, 0, true)
                                 : random_packed_pair(rng, 1 + static_cast<int>(rng.below(10)), 2).lower;
      for (int z = 1; z <= 2; ++z) {
        if (s.can_shift(-z)) {
          ++checks;
          failures += !dominates(theta_shift(s, -z), s);
        }
        if (s.can_shift(z)) {
          ++checks;
          failures += !dominates(s_relabel(theta_shift(s, z), z), s);
        }
      }
    }
    r.measured = {{"checks", double(checks)}, {"failures", double(failures)}};
    r.thresholds = {{"max_failures", 0}};
    r.seeds.push_back(seed_note("random states", master, 1));
    r.verdict = failures == 0 && checks > 0 ? Verdict::kPass : Verdict::kFail;
    r.detail = "Theta_{-z} s >= s and S_z Theta_z s >= s for z in {1, 2}";
  }

  AcceptanceOptions opt_;
  RateKernel p_;
  std::optional<SpeedRuns> speed_;
};

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInvalid: return "invalid";
  }
  return "?";
}

const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids = {
      "coupling-order",         "selector-oracle", "marginal-law",     "bernoulli-current",
      "current-positivity",     "error-bound",     "constant-current", "halfline-density",
      "halfline-current-bound", "three-class-comparison", "identity-checks", "tagged-speed",
      "monotone-F",             "shift-monotonicity"};
  return ids;
}

std::vector<AcceptanceResult> run_acceptance(const std::string& which, const AcceptanceOptions& options) {
  const auto& ids = criterion_ids();
  std::vector<int> numbers;
  if (which == "all") {
    for (int k = 1; k <= static_cast<int>(ids.size()); ++k) numbers.push_back(k);
  } else {
    for (std::size_t k = 0; k < ids.size(); ++k)
      if (ids[k] == which || std::to_string(k + 1) == which) numbers.push_back(static_cast<int>(k + 1));
    if (numbers.empty()) throw std::invalid_argument("unknown acceptance criterion '" + which + "'");
  }
  Suite suite(options);
  std::vector<AcceptanceResult> out;
  for (int k : numbers) out.push_back(suite.run(k));
  std::ofstream(std::filesystem::path(options.out_dir) / "verdicts.json") << verdicts_json(out);
  return out;
}

std::string format_result(const AcceptanceResult& r) {
  std::ostringstream os;
  std::string v = to_string(r.verdict);
  for (char& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  os << v << "  " << r.number << " " << r.id << "  ";
  for (std::size_t k = 0; k < r.measured.size(); ++k)
    os << (k ? ", " : "") << r.measured[k].first << "=" << r.measured[k].second;
  os << "  (" << static_cast<long>(r.seconds * 10) / 10.0 << " s)";
  if (r.verdict != Verdict::kPass && !r.detail.empty()) os << "\n    " << r.detail;
  return os.str();
}

std::string verdicts_json(const std::vector<AcceptanceResult>& results) {
  Json arr = Json::array();
  for (const auto& r : results) {
    Json j;
    j["criterion"] = r.number;
    j["id"] = r.id;
    j["verdict"] = to_string(r.verdict);
    Json m = Json::object(), t = Json::object();
    for (const auto& [k, v] : r.measured) m[k] = v;
    for (const auto& [k, v] : r.thresholds) t[k] = v;
    j["measured"] = m;
    j["thresholds"] = t;
    j["detail"] = r.detail;
    j["seeds"] = r.seeds;
    j["invariant_violation"] = r.invariant_violation;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

int acceptance_exit_code(const std::vector<AcceptanceResult>& results) {
  bool fail = false;
  for (const auto& r : results) {
    if (r.invariant_violation) return kExitInvariant;
    fail = fail || r.verdict != Verdict::kPass;
  }
  return fail ? kExitFail : kExitPass;
}

}  // namespace exclab
