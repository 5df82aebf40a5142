#pragma once

#include "loceff/typecheck.hpp"

namespace loceff {

struct GenConfig {
  uint64_t seed = 42;
  size_t count = 200;
  size_t size_budget = 25;
  Signature pool;  // empty means the default {choose, tick} pool
  bool closed_top = false;  // force an empty top-level signature
};

struct GenTerm {
  CompPtr comp;
  CompTypePtr type;
};

Signature default_pool();

// Well-typed closed computations with ground result types; handlers only in
// handle position and lambdas only directly applied.
std::vector<GenTerm> generate_corpus(const GenConfig& cfg);

}  // namespace loceff
