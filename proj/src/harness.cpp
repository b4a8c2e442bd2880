#include "exclab/harness.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "exclab/env_process.hpp"
#include "exclab/half_line.hpp"
#include "exclab/labeled_coupling.hpp"
#include "exclab/observables.hpp"

namespace exclab {

namespace {

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string ci_text(const std::vector<double>& values) {
  if (values.size() < 2) return values.empty() ? "n/a" : num(values.front());
  const BatchCI ci = batch_ci(values, 0.99);
  return num(ci.mean) + " +- " + num(ci.halfwidth) + " (99%)";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string text() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

std::vector<CylinderSpec> cylinder_specs(const EnvSection& e) {
  std::vector<CylinderSpec> out;
  for (const auto& c : e.cylinders) out.push_back(CylinderSpec::parse(c));
  return out;
}

ExperimentOutcome run_env_experiment(const ExperimentConfig& cfg, CsvTable& csv) {
  const RateKernel p(cfg.kernel);
  const TaggedKernel q(cfg.tagged);
  const auto& e = cfg.env;
  EnvRunOptions opt;
  opt.horizon = cfg.horizon;
  opt.grid = BatchGrid::with_burn_in(cfg.horizon, e.burn_in, e.batches);
  opt.use_grid = true;
  opt.cylinders = cylinder_specs(e);
  for (const auto& b : e.currents) {
    const auto ij = parse_int_list(b, "env.currents");
    opt.currents.push_back({ij[0], ij[1], CurrentMode::kCounting});
  }
  opt.boundary_monitor = e.boundary_monitor;

  const auto n = static_cast<std::size_t>(cfg.replicas);
  std::vector<EnvReport> reports(n);
  parallel_for(n, cfg.threads, [&](std::size_t r) {
    Rng rng = Rng::stream(cfg.seed, r);
    EnvInit init = StepInit{};
    if (e.init == "bernoulli") init = BernoulliInit{e.density};
    EnvState s = EnvState::init(e.W, init, e.lambda, e.rho, rng);
    reports[r] = run_env(s, p, q, opt, rng);
  });

  csv.header = {"replica", "T", "N_T", "D_T", "r_T", "l_T"};
  for (const auto& c : opt.cylinders) csv.header.push_back("avg" + c.name());
  for (const auto& c : opt.currents) csv.header.push_back(c.name());
  for (const char* h : {"R_T", "L_T", "events", "N_over_T", "D_over_T", "flagged", "conserved"}) csv.header.push_back(h);
  ExperimentOutcome out;
  std::vector<double> nt, dt;
  int flagged = 0;
  bool conserved = true;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rep = reports[r];
    const double T = rep.T > 0.0 ? rep.T : 1.0;
    std::vector<std::string> row = {std::to_string(r),
                                    num(rep.T),
                                    std::to_string(rep.counters.N()),
                                    std::to_string(rep.counters.D()),
                                    std::to_string(rep.counters.r),
                                    std::to_string(rep.counters.l)};
    for (const auto& c : rep.cylinders) row.push_back(num(c.value));
    for (const auto& c : rep.currents) row.push_back(num(c.value));
    for (const auto& v : {std::to_string(rep.counters.R), std::to_string(rep.counters.L), std::to_string(rep.events),
                          num(rep.counters.N() / T), num(rep.counters.D() / T), std::string(rep.flagged ? "1" : "0"),
                          std::string(rep.conserved() ? "1" : "0")})
      row.push_back(v);
    csv.rows.push_back(std::move(row));
    nt.push_back(rep.counters.N() / T);
    dt.push_back(rep.counters.D() / T);
    flagged += rep.flagged;
    conserved = conserved && rep.conserved();
  }
  out.summary = "N_T/T = " + ci_text(nt) + "\nD_T/T = " + ci_text(dt) + "\nflagged replicas: " +
                std::to_string(flagged) + "\n";
  if (!conserved) {
    out.summary += "particle bookkeeping violated\n";
    out.exit_code = kExitInvariant;
  }
  return out;
}

ExperimentOutcome run_halfline_experiment(const ExperimentConfig& cfg, CsvTable& csv) {
  const RateKernel p(cfg.kernel);
  const auto& h = cfg.halfline;
  BoundaryRunOptions opt;
  opt.horizon = cfg.horizon;
  opt.grid = BatchGrid::with_burn_in(cfg.horizon, h.burn_in, h.batches);
  for (const auto& pat : h.patterns) opt.patterns.push_back(parse_int_list(pat, "halfline.patterns"));
  opt.bonds = h.bonds;

  const auto n = static_cast<std::size_t>(cfg.replicas);
  std::vector<BoundaryReport> reports(n);
  parallel_for(n, cfg.threads, [&](std::size_t r) {
    Rng rng = Rng::stream(cfg.seed, r);
    BoundaryState s(h.m, h.n, h.lambda, h.rho);
    reports[r] = run_boundary(s, p, opt, rng);
  });

  // Profile across replicas: one row per translate offset (or bond), with the
  // replica spread as a t interval.
  csv.header = {"site", "avg_density", "ci_halfwidth", "observable"};
  auto row = [&](int site, const std::vector<double>& v, const std::string& name) {
    const std::string hw = v.size() > 1 ? num(batch_ci(v, 0.99).halfwidth) : "nan";
    double m = 0.0;
    for (double x : v) m += x;
    csv.rows.push_back({std::to_string(site), num(m / static_cast<double>(v.size())), hw, "\"" + name + "\""});
  };
  std::vector<std::vector<double>> cesaro(opt.patterns.size());
  std::vector<std::vector<double>> currents(opt.bonds.size());
  for (std::size_t k = 0; k < opt.patterns.size(); ++k) {
    std::vector<TranslateProfile> profs;
    for (const auto& rep : reports) {
      profs.push_back(rep.trackers[k].profile());
      cesaro[k].push_back(cesaro_translate(profs.back(), h.bulk_from, h.bulk_count));
    }
    for (std::size_t i = 0; i < profs[0].avg.size(); ++i) {
      std::vector<double> v;
      for (const auto& pr : profs) v.push_back(pr.avg[i]);
      row(profs[0].first_offset + static_cast<int>(i), v, "A={" + h.patterns[k] + "}");
    }
  }
  for (std::size_t b = 0; b < opt.bonds.size(); ++b) {
    for (const auto& rep : reports) currents[b].push_back(rep.currents[b].value);
    row(opt.bonds[b], currents[b], reports[0].currents[b].name);
  }
  ExperimentOutcome out;
  for (std::size_t k = 0; k < cesaro.size(); ++k)
    out.summary += "Cesaro mean over offsets " + std::to_string(h.bulk_from) + ".." +
                   std::to_string(h.bulk_from + h.bulk_count - 1) + ", A={" + h.patterns[k] +
                   "}: " + ci_text(cesaro[k]) + "\n";
  for (std::size_t b = 0; b < currents.size(); ++b)
    out.summary += "current across (" + std::to_string(opt.bonds[b]) + "," + std::to_string(opt.bonds[b] + 1) +
                   "): " + ci_text(currents[b]) + "\n";
  return out;
}

ExperimentOutcome run_threeclass_experiment(const ExperimentConfig& cfg, CsvTable& csv) {
  const RateKernel p(cfg.kernel);
  std::vector<std::set<int>> sets;
  for (const auto& s : cfg.threeclass.sets) {
    const auto v = parse_int_list(s, "threeclass.sets");
    sets.emplace_back(v.begin(), v.end());
  }
  const int W = cfg.threeclass.W;
  const auto tc = run_three_class(W, p, cfg.horizon, sets, cfg.replicas, cfg.seed);
  int blockage_flagged = 0;
  const auto bl = blockage_occupation(W, p, cfg.horizon, sets, cfg.replicas, mix64(cfg.seed), &blockage_flagged);
  csv.header = {"set", "three_class", "three_class_se", "class1", "class1_se", "blockage", "blockage_se"};
  ExperimentOutcome out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& e = tc.estimates[k];
    csv.rows.push_back({"\"" + cfg.threeclass.sets[k] + "\"", num(e.three_class), num(e.three_class_se),
                        num(e.particle), num(e.particle_se), num(bl[k].first), num(bl[k].second)});
    out.summary += "B={" + cfg.threeclass.sets[k] + "}: P(not class 3) = " + num(e.three_class) + " (se " +
                   num(e.three_class_se) + "), blockage P(occupied) = " + num(bl[k].first) + " (se " +
                   num(bl[k].second) + ")\n";
  }
  out.summary += "flagged replicas: three-class " + std::to_string(tc.flagged) + ", blockage " +
                 std::to_string(blockage_flagged) + "\n";
  if (!tc.conserved || !tc.class3_monotone) {
    out.summary += "class bookkeeping violated\n";
    out.exit_code = kExitInvariant;
  }
  return out;
}

// Counting identity F(X_0) - F(X_T) = N + r (shifted right jumps) or N - l
// (shifted left jumps), for a process with a blocked origin.
bool counting_identity(const LabeledSummary& s, LabeledGenerator g) {
  long rhs = s.counters.N;
  if (g == LabeledGenerator::kRightShift) rhs += s.counters.r;
  if (g == LabeledGenerator::kLeftShift) rhs -= s.counters.l;
  return s.f0 - s.fT == rhs;
}

ExperimentOutcome run_couple_experiment(const ExperimentConfig& cfg, CsvTable& csv,
                                        const std::filesystem::path& out_dir, std::vector<std::string>& files) {
  const RateKernel p(cfg.kernel);
  const TaggedKernel q(cfg.tagged);
  const auto& k = cfg.couple;
  const CouplingVariant v = parse_variant(k.variant);
  const auto upper_gen = v == CouplingVariant::kRight ? LabeledGenerator::kRightShift : LabeledGenerator::kPlain;
  const auto lower_gen = v == CouplingVariant::kLeft ? LabeledGenerator::kLeftShift : LabeledGenerator::kPlain;

  const auto n = static_cast<std::size_t>(cfg.replicas);
  std::vector<CoupledReport> reports(n);
  auto run_one = [&](std::size_t r, bool log) {
    Rng rng = Rng::stream(cfg.seed, r);
    CoupledState c = random_ordered_pair(rng, k.particles, -k.span, k.span, p.range(), k.origin_blocked);
    CoupledRunOptions opt;
    opt.horizon = cfg.horizon;
    opt.tracked_label = k.tracked_label;
    opt.record_log = log;
    return coupled_run(c, p, q, v, opt, rng);
  };
  parallel_for(n, cfg.threads, [&](std::size_t r) { reports[r] = run_one(r, k.record_log); });

  csv.header = {"replica", "events", "violation", "flagged"};
  for (const char* who : {"upper", "lower"})
    for (const char* f : {"f0", "fT", "N", "r", "l", "displacement"}) csv.header.push_back(std::string(who) + "_" + f);
  ExperimentOutcome out;
  long events = 0, violations = 0, identity_failures = 0, flagged = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rep = reports[r];
    std::vector<std::string> row = {std::to_string(r), std::to_string(rep.events), rep.violation ? "1" : "0",
                                    rep.flagged ? "1" : "0"};
    for (const LabeledSummary* s : {&rep.upper, &rep.lower}) {
      for (long x : {s->f0, s->fT, s->counters.N, s->counters.r, s->counters.l}) row.push_back(std::to_string(x));
      row.push_back(s->displacement == LabeledState::kMinusInf ? "NA" : std::to_string(s->displacement));
    }
    csv.rows.push_back(std::move(row));
    events += rep.events;
    flagged += rep.flagged;
    if (k.origin_blocked && !rep.violation &&
        (!counting_identity(rep.upper, upper_gen) || !counting_identity(rep.lower, lower_gen)))
      ++identity_failures;
    if (rep.violation) {
      ++violations;
      const auto logged = k.record_log ? rep : run_one(r, true);
      std::string text = logged.diagnostic + "\ntime,event-kind,label,z,s\n";
      for (const auto& line : logged.log) text += format_log_line(line) + "\n";
      const auto path = out_dir / ("couple_violation_" + std::to_string(r) + ".log");
      write_file(path, text);
      files.push_back(path.string());
    }
    if (k.record_log) {
      std::string text = "time,event-kind,label,z,s\n";
      for (const auto& line : rep.log) text += format_log_line(line) + "\n";
      const auto path = out_dir / ("couple_events_" + std::to_string(r) + ".csv");
      write_file(path, text);
      files.push_back(path.string());
    }
  }
  out.summary = "variant " + k.variant + ": " + std::to_string(events) + " events, " + std::to_string(violations) +
                " order violations, " + std::to_string(identity_failures) + " counting identity failures, " +
                std::to_string(flagged) + " flagged replicas\n";
  if (violations > 0 || identity_failures > 0) out.exit_code = kExitInvariant;
  return out;
}

}  // namespace

const char* code_version() { return "exclusion-lab 1.0.0"; }

std::string manifest_json(const ExperimentConfig& cfg, const std::vector<std::string>& files) {
  const std::string canon = to_toml(cfg);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  nlohmann::ordered_json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  j["config_hash"] = hash;
  j["code_version"] = code_version();
  j["seed_derivation"] = "replica r uses Rng::stream(seed, r)";
  j["config"] = canon;
  j["files"] = files;
  return j.dump(2) + "\n";
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  validate_config(cfg);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  CsvTable csv;
  std::vector<std::string> files;
  ExperimentOutcome out;
  if (cfg.experiment == "env")
    out = run_env_experiment(cfg, csv);
  else if (cfg.experiment == "halfline")
    out = run_halfline_experiment(cfg, csv);
  else if (cfg.experiment == "threeclass")
    out = run_threeclass_experiment(cfg, csv);
  else
    out = run_couple_experiment(cfg, csv, dir, files);
  const auto csv_path = dir / (cfg.experiment + ".csv");
  write_file(csv_path, csv.text());
  files.insert(files.begin(), csv_path.string());
  const auto manifest_path = dir / (cfg.experiment + ".manifest.json");
  write_file(manifest_path, manifest_json(cfg, files));
  files.push_back(manifest_path.string());
  out.files = files;
  return out;
}

TaggedGap select_tagged_gap(double c1, double q_plus, const RateKernel& p) {
  if (!(q_plus > 0.0))
    throw std::invalid_argument("select_tagged_gap: q(1) must be positive (a positive speed needs q(-1) > q(1) > 0)");
  if (!(p(2) > 0.0)) throw std::invalid_argument("select_tagged_gap: p(2) must be positive");
  TaggedGap g;
  g.c0 = c1 - 2.2 * q_plus;
  if (!(g.c0 > 0.0))
    throw std::invalid_argument("select_tagged_gap: kernel too slow, C1 = " + num(c1) +
                                " does not exceed 2.2 q(1); q(1) must shrink");
  g.q_minus = q_plus + 0.25 * (q_plus / p(2)) * g.c0;
  g.predicted_speed = (q_plus / p(2)) * g.c0 - (g.q_minus - q_plus);
  return g;
}

}  // namespace exclab
