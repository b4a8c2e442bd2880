// Runs every acceptance criterion and prints one line per criterion.
// Exit status follows the command line tool: 0 all pass, 1 some fail,
// 2 invariant violation.

#include <cstring>
#include <iostream>
#include <string>

#include "exclab/acceptance.hpp"

int main(int argc, char** argv) {
  exclab::AcceptanceOptions opt;
  opt.out_dir = "acceptance-out";
  std::string which = "all";
  for (int k = 1; k < argc; ++k) {
    if (!std::strcmp(argv[k], "--out") && k + 1 < argc) opt.out_dir = argv[++k];
    else if (!std::strcmp(argv[k], "--seed") && k + 1 < argc) opt.seed = std::stoull(argv[++k]);
    else which = argv[k];
  }
  const auto results = exclab::run_acceptance(which, opt);
  int passed = 0;
  for (const auto& r : results) {
    std::cout << exclab::format_result(r) << std::endl;
    passed += r.verdict == exclab::Verdict::kPass;
  }
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return exclab::acceptance_exit_code(results);
}
