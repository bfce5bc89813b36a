#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace supq {

struct SuiteReport {
  std::string suite;
  long passed = 0;
  long failed = 0;
  std::vector<std::string> failures;  // first few failing checks, for the log
};

// name in {rootdata, group, quadrature, lemmas}. Same seed, same report.
SuiteReport run_suite(const std::string &name, std::uint64_t seed);

std::vector<SuiteReport> run_all_suites(std::uint64_t seed);

}  // namespace supq
