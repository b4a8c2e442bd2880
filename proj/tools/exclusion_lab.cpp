#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "exclab/acceptance.hpp"
#include "exclab/config.hpp"
#include "exclab/event_core.hpp"
#include "exclab/harness.hpp"
#include "exclab/kernels.hpp"

using namespace exclab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::optional<int> threads;
  std::string out = "out";
  std::string config;
  std::optional<std::string> variant;
};

int run_one(const std::string& experiment, const Globals& g) {
  try {
    ExperimentConfig cfg;
    if (!g.config.empty()) {
      cfg = load_config(g.config);
      if (!cfg.experiment.empty() && cfg.experiment != experiment)
        throw ConfigError("experiment: config is for '" + cfg.experiment + "', not '" + experiment + "'");
    }
    cfg.experiment = experiment;
    if (g.seed) cfg.seed = *g.seed;
    if (g.replicas) cfg.replicas = *g.replicas;
    if (g.threads) cfg.threads = *g.threads;
    if (g.variant) cfg.couple.variant = *g.variant;
    const ExperimentOutcome out = run_experiment(cfg, g.out);
    std::cout << out.summary;
    for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const KernelError& e) {
    std::cerr << "config error: kernel: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  }
}

int run_verify(const std::string& which, const Globals& g) {
  AcceptanceOptions opt;
  if (g.seed) opt.seed = *g.seed;
  if (g.threads) opt.threads = *g.threads;
  opt.out_dir = g.out;
  std::vector<AcceptanceResult> results;
  try {
    results = run_acceptance(which, opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  for (const auto& r : results) std::cout << format_result(r) << "\n";
  return acceptance_exit_code(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for exclusion processes with a tagged particle"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--replicas", g.replicas, "Replica count (experiments)");
  app.add_option("--threads", g.threads, "Worker threads, 0 for all cores");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "Experiment config file (TOML subset)");

  int code = kExitPass;
  for (const char* name : {"env", "halfline", "threeclass", "couple"}) {
    static const std::map<std::string, std::string> help = {
        {"env", "Environment process seen from the tagged particle"},
        {"halfline", "Boundary-driven segment with reservoirs"},
        {"threeclass", "Three-class comparison against the blockage process"},
        {"couple", "Order-preserving coupling of two labeled processes"}};
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->callback([&code, &g, n = std::string(name)]() { code = run_one(n, g); });
    if (std::string(name) == "couple")
      sub->add_option("--variant", g.variant, "Coupling variant: plus, full, right or left");
  }
  std::string which;
  auto* verify = app.add_subcommand("verify", "Run an acceptance criterion by id or number, or all");
  verify->add_option("criterion", which, "Criterion id, number, or 'all'")->required();
  verify->callback([&]() { code = run_verify(which, g); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  return code;
}
