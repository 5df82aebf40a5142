#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "loceff/suite.hpp"

TEST_CASE("every property suite passes") {
  loceff::SuiteConfig cfg;
  auto results = loceff::run_property_suites(cfg);
  REQUIRE(results.size() == 9);
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("suites are deterministic for a fixed seed") {
  loceff::SuiteConfig cfg;
  cfg.gen_count = 40;
  auto a = loceff::run_property_suites(cfg);
  auto b = loceff::run_property_suites(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].pass == b[i].pass);
    CHECK(a[i].detail == b[i].detail);
  }
}
