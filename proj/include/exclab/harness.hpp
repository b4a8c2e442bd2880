#pragma once

// Experiment runner: replica fan-out, CSV output with a manifest, and the
// tagged-gap selection rule.
//
// Replica r of an experiment with master seed s draws from Rng::stream(s, r);
// results are gathered by replica index, so output does not depend on the
// number of worker threads.

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "exclab/config.hpp"
#include "exclab/kernels.hpp"

namespace exclab {

/// Process exit codes of the command line tool.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInvariant = 2, kExitConfig = 3 };

/// Calls f(k) for k in [0, n) on up to `threads` workers (0: hardware
/// concurrency). The first exception thrown by any call is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          f(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ExperimentOutcome {
  int exit_code = kExitPass;
  std::string summary;             // human readable, one line per item
  std::vector<std::string> files;  // written paths
};

/// Validates and runs cfg, writing <out>/<experiment>.csv and
/// <out>/<experiment>.manifest.json. Throws ConfigError on an invalid config.
/// A coupling order violation yields exit code kExitInvariant and a
/// diagnostic log next to the CSV.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Version string recorded in manifests.
const char* code_version();

/// Manifest JSON: experiment, seed, replicas, config hash (FNV-1a of the
/// canonical config text), the canonical text itself, code version and the
/// listed output files.
std::string manifest_json(const ExperimentConfig& cfg, const std::vector<std::string>& files);

struct TaggedGap {
  double c0 = 0.0;               // C1 - 2.2 q(1)
  double q_minus = 0.0;          // q(-1)
  double predicted_speed = 0.0;  // (q(1)/p(2)) C0 - (q(-1) - q(1))
};

/// q(-1) = q(1) + 0.25 (q(1)/p(2)) C0 with C0 = C1 - 2.2 q(1). Throws
/// std::invalid_argument when C0 <= 0 ("kernel too slow"), q(1) <= 0 or
/// p(2) <= 0.
TaggedGap select_tagged_gap(double c1, double q_plus, const RateKernel& p);

}  // namespace exclab
