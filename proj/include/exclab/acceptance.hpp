#pragma once

// The acceptance suite: each criterion runs at fixed desk-scale parameters and
// yields a verdict. Criteria are addressed by id ("coupling-order") or number.
//
// The blockage current estimate C1 from "current-positivity" is cached in
// <out>/c1_estimate.json together with a hash of the run parameters;
// "error-bound", "identity-checks" and "tagged-speed" read it and fail with
// "run current-positivity first" when it is missing or stale.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace exclab {

enum class Verdict { kPass, kFail, kInvalid };
const char* to_string(Verdict v);

struct AcceptanceResult {
  int number = 0;
  std::string id;
  Verdict verdict = Verdict::kFail;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<std::pair<std::string, double>> thresholds;
  std::string detail;
  std::vector<std::string> seeds;  // replayable (master seed, stream range) per contributing run
  bool invariant_violation = false;
  double seconds = 0.0;  // wall time; not part of the verdict file
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  std::string out_dir = "acceptance-out";
  int threads = 0;
};

/// Criterion ids in suite order.
const std::vector<std::string>& criterion_ids();

/// Runs one criterion (by id or number as text) or "all". Unknown ids throw
/// std::invalid_argument. Writes <out>/verdicts.json.
std::vector<AcceptanceResult> run_acceptance(const std::string& which, const AcceptanceOptions& options);

/// One line per result: "PASS  1 coupling-order  ...".
std::string format_result(const AcceptanceResult& r);

/// Deterministic JSON of the results (wall times omitted).
std::string verdicts_json(const std::vector<AcceptanceResult>& results);

/// Exit code for a result list: 2 on an invariant violation, else 1 if any
/// criterion did not pass, else 0.
int acceptance_exit_code(const std::vector<AcceptanceResult>& results);

}  // namespace exclab
