#pragma once

#include <iosfwd>

#include "loceff/driver.hpp"

namespace loceff {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteConfig {
  uint64_t seed = 42;
  size_t gen_count = 120;
  std::string corpus_dir;
};

// Property suites shared by `loceff selftest` and the test binaries.
std::vector<SuiteResult> run_property_suites(const SuiteConfig& cfg);

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// The ten acceptance checks; prints one line per criterion when out is given.
std::vector<CriterionResult> run_acceptance(const SuiteConfig& cfg, std::ostream* out = nullptr);

}  // namespace loceff
