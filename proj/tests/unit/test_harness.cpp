#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "exclab/acceptance.hpp"
#include "exclab/config.hpp"
#include "exclab/harness.hpp"

using namespace exclab;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("exclab-test-" + name);
  std::filesystem::remove_all(p);
  return p.string();
}
}  // namespace

TEST_SUITE("harness") {

TEST_CASE("toml subset") {
  const auto t = parse_toml(
      "# comment\n"
      "experiment = \"env\"\n"
      "seed = 7\n"
      "kernel = {1 = 2.0, \"-1\" = 1.0}\n"
      "[env]\n"
      "W = 80  # trailing\n"
      "cylinders = [\"[x=-1](1-x=1)\", \"[x=1]\"]\n"
      "boundary_monitor = false\n");
  CHECK(std::get<std::string>(t.at("experiment")) == "env");
  CHECK(std::get<long long>(t.at("seed")) == 7);
  CHECK(std::get<double>(t.at("kernel.-1")) == 1.0);
  CHECK(std::get<long long>(t.at("env.W")) == 80);
  CHECK(std::get<bool>(t.at("env.boundary_monitor")) == false);
  CHECK(std::get<std::vector<TomlScalar>>(t.at("env.cylinders")).size() == 2);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = \n"), ConfigError);
}

TEST_CASE("config round-trip") {
  ExperimentConfig c;
  c.experiment = "couple";
  c.seed = 99;
  c.replicas = 3;
  c.horizon = 2.5;
  c.tagged = {{1, 0.01}, {-1, 0.0125}};
  c.env.cylinders = {"[x=-1](1-x=1)"};
  c.env.currents = {"5,6"};
  c.halfline.bonds = {10, 20};
  c.couple.variant = "left";
  c.couple.record_log = true;
  const auto text = to_toml(c);
  CHECK(config_from_toml(parse_toml(text)) == c);
  CHECK(to_toml(config_from_toml(parse_toml(text))) == text);
}

TEST_CASE("config validation names the field") {
  ExperimentConfig c;
  c.experiment = "env";
  c.replicas = 0;
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("replicas"), ConfigError);
  c.replicas = 1;
  c.experiment = "nope";
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("experiment"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_toml(parse_toml("experiment = \"env\"\nwidth = 3\n")),
                       doctest::Contains("width"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_toml(parse_toml("seed = \"x\"\n")), doctest::Contains("seed"), ConfigError);
  CHECK_THROWS_AS(parse_int_list("1,x", "sets"), ConfigError);
  CHECK(parse_int_list("1,2,-3", "sets") == std::vector<int>{1, 2, -3});
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("tagged gap") {
  const RateKernel p = default_kernel();
  const auto g = select_tagged_gap(0.2, 0.01, p);
  CHECK(g.c0 == doctest::Approx(0.178));
  CHECK(g.q_minus == doctest::Approx(0.010445));
  CHECK(g.predicted_speed == doctest::Approx(0.75 * 0.01 * 0.178));
  CHECK(g.predicted_speed >= 0.0013);
  CHECK_THROWS_WITH(select_tagged_gap(0.022, 0.01, p), doctest::Contains("kernel too slow"));
  CHECK_THROWS_AS(select_tagged_gap(0.2, 0.0, p), std::invalid_argument);
}

TEST_CASE("experiments are deterministic") {
  for (const char* exp : {"env", "halfline", "threeclass", "couple"}) {
    ExperimentConfig c;
    c.experiment = exp;
    c.replicas = 2;
    c.horizon = 2.0;
    c.threads = 2;
    c.env.W = 60;
    c.halfline.n = 40;
    c.halfline.bulk_from = 10;
    c.halfline.bulk_count = 20;
    c.threeclass.W = 40;
    c.couple.particles = 10;
    c.couple.span = 15;
    c.couple.tracked_label = 5;
    if (std::string(exp) == "env") c.tagged = {{1, 0.1}, {-1, 0.1}};
    const auto a = temp_dir(std::string(exp) + "-a"), b = temp_dir(std::string(exp) + "-b");
    const auto ra = run_experiment(c, a);
    c.threads = 1;
    const auto rb = run_experiment(c, b);
    CHECK(ra.exit_code == kExitPass);
    CHECK(rb.exit_code == kExitPass);
    const std::string csv = std::string("/") + exp + ".csv";
    CHECK(slurp(a + csv) == slurp(b + csv));
    CHECK(slurp(a + csv).size() > 0);
    CHECK(slurp(a + "/" + exp + ".manifest.json").find("config_hash") != std::string::npos);
  }
}

TEST_CASE("bad experiment configs") {
  ExperimentConfig c;
  c.experiment = "env";
  c.replicas = 0;
  CHECK_THROWS_AS(run_experiment(c, temp_dir("bad")), ConfigError);
  c.experiment = "unknown";
  c.replicas = 1;
  CHECK_THROWS_AS(run_experiment(c, temp_dir("bad")), ConfigError);
}

TEST_CASE("acceptance plumbing") {
  CHECK(criterion_ids().size() == 14);
  AcceptanceOptions o;
  o.out_dir = temp_dir("acc");
  const auto r = run_acceptance("tagged-speed", o);
  REQUIRE(r.size() == 1);
  CHECK(r[0].verdict == Verdict::kFail);
  CHECK(r[0].detail == "run current-positivity first");
  CHECK_THROWS_AS(run_acceptance("no-such-criterion", o), std::invalid_argument);
  const auto a = run_acceptance("monotone-F", o), b = run_acceptance("13", o);
  CHECK(verdicts_json(a) == verdicts_json(b));
  CHECK(acceptance_exit_code(a) == kExitPass);
}
}
