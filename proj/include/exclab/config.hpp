#pragma once

// Experiment configuration in a TOML subset:
//
//   # comment
//   key = value              value: "string", integer, decimal, true/false,
//   [section]                       or a one-line array [v, v, ...]
//   [section.sub]
//   name = {1 = 2.0, -1 = 1.0}
//
// Keys are flattened to dotted paths ("kernel.-1"), which is how signed
// integer keyed tables (kernels) are stored.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace exclab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TomlScalar = std::variant<bool, long long, double, std::string>;
using TomlValue = std::variant<bool, long long, double, std::string, std::vector<TomlScalar>>;
using TomlTable = std::map<std::string, TomlValue>;

/// Throws ConfigError with the line number on malformed input or a repeated
/// key.
TomlTable parse_toml(const std::string& text);

struct EnvSection {
  int W = 400;
  std::string init = "step";  // step | bernoulli
  double density = 0.5;       // bernoulli init only
  double lambda = 1.0;
  double rho = 0.0;
  double burn_in = 0.0;
  int batches = 1;
  std::vector<std::string> cylinders;  // e.g. "[x=-1](1-x=1)"
  std::vector<std::string> currents;   // bonds "i,j"
  bool boundary_monitor = true;

  bool operator==(const EnvSection&) const = default;
};

struct HalfLineSection {
  int m = 1;
  int n = 200;
  double lambda = 1.0;
  double rho = 0.0;
  double burn_in = 0.5;
  int batches = 10;
  std::vector<std::string> patterns = {"0", "0,1"};
  int bulk_from = 50;  // Cesaro window of translates
  int bulk_count = 100;
  std::vector<int> bonds;  // bond (i, i+1) currents

  bool operator==(const HalfLineSection&) const = default;
};

struct ThreeClassSection {
  int W = 200;
  std::vector<std::string> sets = {"1", "1,2"};

  bool operator==(const ThreeClassSection&) const = default;
};

struct CoupleSection {
  std::string variant = "right";
  int particles = 40;
  int span = 40;  // initial sites drawn from -span..span
  bool origin_blocked = true;
  long tracked_label = 20;
  bool record_log = false;

  bool operator==(const CoupleSection&) const = default;
};

struct ExperimentConfig {
  std::string experiment;  // env | halfline | threeclass | couple
  std::uint64_t seed = 1;
  int replicas = 16;
  double horizon = 50.0;
  int threads = 0;  // 0: hardware concurrency
  std::map<int, double> kernel = {{1, 2.0}, {-1, 1.0}, {2, 1.0}, {-2, 1.0}};
  std::map<int, double> tagged;
  EnvSection env;
  HalfLineSection halfline;
  ThreeClassSection threeclass;
  CoupleSection couple;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Builds a config from parsed TOML, rejecting unknown keys and wrongly
/// typed values with the offending field named. Does not validate ranges.
ExperimentConfig config_from_toml(const TomlTable& t);
ExperimentConfig load_config(const std::string& path);
/// Canonical text; config_from_toml(parse_toml(to_toml(c))) == c.
std::string to_toml(const ExperimentConfig& c);
/// Range and consistency checks for the selected experiment. Throws
/// ConfigError naming the field.
void validate_config(const ExperimentConfig& c);

/// "1,2,-3" -> {1, 2, -3}. Throws ConfigError naming `field`.
std::vector<int> parse_int_list(const std::string& text, const std::string& field);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace exclab
